import numpy as np
import diffeolab.diffeo as D
from diffeolab.config import DEFAULT_TOL
from diffeolab.modulus import holder
from diffeolab.reduction import make_config
import diffeolab.fixpoint as FP
from diffeolab.diffeo import identity, inverse

tol = DEFAULT_TOL
cfg = make_config(2, holder(0.5), 4)
f = FP.calibrated_bump(1e-3, holder(0.5), k=2, tol=tol)
Q = FP.make_rescaler(cfg, tol)
Qi = inverse(Q, tol)

orig = D._build_adaptive
log = []

def spy(tail, lo, hi, k, fn, n0, tol):
    out = orig(tail, lo, hi, k, fn, n0, tol)
    log.append((tail, round(lo, 6), round(hi, 6), int(n0), out.n))
    return out

D._build_adaptive = spy
import diffeolab.reduction as R
R._build_adaptive = spy

u = identity(cfg.k, cfg.D[0], cfg.D[1])
records = []
for it in range(1, 5):
    log.clear()
    step = FP._renorm_full(u, f, Q, Qi, cfg, tol)
    records.append(list(log))
    r = FP.ck_distance(step.map, u)
    print(f"it={it} resid={r:.3e} builds={len(log)}")
    u = step.map

base = records[2]
for it, rec in enumerate(records, 1):
    if len(rec) != len(base):
        print(f"  it{it}: build-count differs: {len(rec)} vs {len(base)}")
        continue
    for j, (x, y) in enumerate(zip(rec, base)):
        if x != y:
            print(f"  it{it} build{j}: {x}  vs it3: {y}")
print("build schedule at it3:")
for j, x in enumerate(base):
    print(" ", j, x)
