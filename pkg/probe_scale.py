import numpy as np
from diffeolab.config import DEFAULT_TOL
from diffeolab.modulus import holder
from diffeolab.reduction import make_config
import diffeolab.fixpoint as FP
from diffeolab.diffeo import identity, inverse

tol = DEFAULT_TOL
cfg = make_config(2, holder(0.5), 4)
Q = FP.make_rescaler(cfg, tol)
Qi = inverse(Q, tol)

for target in (1e-4, 1e-5):
    f = FP.calibrated_bump(target, holder(0.5), k=2, tol=tol)
    u = identity(cfg.k, cfg.D[0], cfg.D[1])
    print(f"--- target norm {target:.0e}")
    for it in range(1, 13):
        step = FP._renorm_full(u, f, Q, Qi, cfg, tol)
        r = FP.ck_distance(step.map, u)
        print(f"it={it:2d}  resid={r:.3e}")
        u = step.map
        if r <= 1e-6:
            print("CONVERGED at", it)
            break
