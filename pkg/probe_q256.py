import numpy as np
from diffeolab.config import DEFAULT_TOL
from diffeolab.modulus import holder
from diffeolab.reduction import make_config
import diffeolab.fixpoint as FP
from diffeolab.diffeo import identity, inverse

tol = DEFAULT_TOL
cfg = make_config(2, holder(0.5), 4)
f = FP.calibrated_bump(1e-3, holder(0.5), k=2, tol=tol)

Q = FP.make_rescaler(cfg, tol)
print("Q nodes:", Q.n, " h:", (Q.b - Q.a) / (Q.n - 1))
Qi = inverse(Q, tol)
print("Qi nodes:", Qi.n)

u = identity(cfg.k, cfg.D[0], cfg.D[1])
for it in range(1, 9):
    step = FP._renorm_full(u, f, Q, Qi, cfg, tol)
    r = FP.ck_distance(step.map, u)
    print(f"it={it}  resid={r:.3e}  norm_fu={step.norm_composed:.3e}  "
          f"norm_g={step.reduction.norm_in:.3e}  norm_red={step.reduction.norm_out:.3e}  "
          f"n(map)={step.map.n}")
    u = step.map
    if r <= 1e-6:
        print("CONVERGED at iteration", it)
        break
