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
Qi = inverse(Q, tol)

u = identity(cfg.k, cfg.D[0], cfg.D[1])
theta = 0.5
for it in range(1, 31):
    step = FP._renorm_full(u, f, Q, Qi, cfg, tol)
    r = FP.ck_distance(step.map, u)
    d = [float(np.max(np.abs(step.map.jet_at(
        np.linspace(-2, 2, 8193), cfg.k)[:, j]
        - u.jet_at(np.linspace(-2, 2, 8193), cfg.k)[:, j])))
        for j in range(cfg.k + 1)]
    print(f"it={it:3d}  resid={r:.3e}  per-order=" +
          "[" + ", ".join(f"{x:.2e}" for x in d) + "]")
    if r <= 1e-6:
        print("CONVERGED (residual below fix_tol) at iteration", it)
        break
    u = FP._mix(u, step.map, theta, tol)
