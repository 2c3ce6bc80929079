import numpy as np
from diffeolab.config import DEFAULT_TOL
from diffeolab.modulus import holder
from diffeolab.reduction import make_config, reduce_norm, roll_up, spread_once
import diffeolab.fixpoint as FP
from diffeolab.diffeo import identity, inverse, compose_all, compose

tol = DEFAULT_TOL
cfg = make_config(2, holder(0.5), 4)
Q = FP.make_rescaler(cfg, tol)
Qi = inverse(Q, tol)
f = FP.calibrated_bump(1e-5, holder(0.5), k=2, tol=tol)

u = identity(cfg.k, cfg.D[0], cfg.D[1])
fu = compose(f, u, tol)
g = compose_all([Q, fu, Qi], tol)
rolled = roll_up(g, tol)
sp = spread_once(rolled, cfg, tol)

print("grid ns:", fu.n, g.n, rolled.n, sp.n)

# order-2 deviation of each stage from the identity-free truth proxy:
# report sup of each displacement jet order on its own refined grid
for name, X in (("fu", fu), ("g", g), ("rolled", rolled), ("spread", sp)):
    xs = np.linspace(X.a, X.b, 4 * (X.n - 1) + 1)
    dj = X.displacement_jets(xs, 2)
    print(f"{name:7s} sup-jets: " +
          " ".join(f"{float(np.max(np.abs(dj[:, j]))):.3e}" for j in range(3)))

# the rolled word displacement directly vs its build, order 2
from diffeolab.reduction import roll_params
i0, L, a_small, s = roll_params(g)
print("word params: inf", i0, "len", L, "a", a_small, "s", s)

# direct word evaluation at probe points vs rolled interpolant
xs = np.linspace(0.0, 1.0, 2049)
dj_build = rolled.displacement_jets(xs, 2)

# recompute word directly: same fn as roll_up uses, via a fresh dense build
rolled_d = roll_up(g, tol, n0=4 * (rolled.n - 1) + 1)
dj_dense = rolled_d.displacement_jets(xs, 2)
print("rolled vs dense-rolled per order:",
      " ".join(f"{float(np.max(np.abs(dj_build[:, j] - dj_dense[:, j]))):.3e}"
               for j in range(3)))

sp2 = spread_once(rolled_d, cfg, tol)
xs2 = np.linspace(sp.a, sp.b, 8193)
d1 = sp.displacement_jets(xs2, 2)
d2 = sp2.displacement_jets(xs2, 2)
print("spread vs spread-of-dense per order:",
      " ".join(f"{float(np.max(np.abs(d1[:, j] - d2[:, j]))):.3e}"
               for j in range(3)))
