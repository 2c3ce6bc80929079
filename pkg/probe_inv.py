import numpy as np
from diffeolab.config import DEFAULT_TOL
from diffeolab.modulus import holder
from diffeolab.reduction import make_config, roll_up, _ZETA
import diffeolab.fixpoint as FP
from diffeolab.diffeo import (identity, inverse, compose_all, compose,
                              post_translate, _build_adaptive)
from diffeolab.jets import invert_derivs
import math

tol = DEFAULT_TOL
cfg = make_config(2, holder(0.5), 4)
Q = FP.make_rescaler(cfg, tol)
Qi = inverse(Q, tol)
f = FP.calibrated_bump(1e-5, holder(0.5), k=2, tol=tol)
u = identity(cfg.k, cfg.D[0], cfg.D[1])
g = compose_all([Q, compose(f, u, tol), Qi], tol)
h = post_translate(roll_up(g, tol), -float(roll_up(g, tol)(np.array(0.0))))
k = 2
binom = [[math.comb(j, i) for i in range(j + 1)] for j in range(k + 1)]

def damped_fn(xs):
    zj = _ZETA.jets(xs, k)
    uj = h.displacement_jets(xs, k)
    out = np.zeros_like(uj)
    for j in range(k + 1):
        for i in range(j + 1):
            out[..., j] += binom[j][i] * zj[..., i] * uj[..., j - i]
    return out

h0 = _build_adaptive("periodic", h.a, h.a + 1.0, k, damped_fn,
                     max(257, h.n), tol)
h0i = inverse(h0, tol)

rng = np.random.default_rng(3)
xs = rng.uniform(0.0, 1.0, 40000)

# 1. h0 interpolant vs its defining data, off-lattice
d = h0.displacement_jets(xs, 2) - damped_fn(xs)
print("h0 vs damped_fn:   " +
      " ".join(f"{float(np.max(np.abs(d[:, j]))):.3e}" for j in range(3)))

# 2. h0i interpolant vs its defining fn, off-lattice
def inv_fn(ys):
    xx = h0.inverse_values(ys, tol.invert_abscissa)
    fj = h0.jet_at(xx, k)
    out = invert_derivs(fj, xx)
    out[..., 0] -= ys
    out[..., 1] -= 1.0
    return out

d2 = h0i.displacement_jets(xs, 2) - inv_fn(xs)
j2 = np.abs(d2[:, 2])
print("h0i vs inverse fn: " +
      " ".join(f"{float(np.max(np.abs(d2[:, j]))):.3e}" for j in range(3)))
print("h0i order-2 err quantiles:",
      " ".join(f"{q:.2e}" for q in np.quantile(j2, [0.5, 0.9, 0.99, 1.0])))
worst = xs[np.argsort(j2)[-12:]]
print("worst abscissae:", np.sort(np.round(worst, 4)))

# where are the zeta ramps? plateau 0.1, ramp to 0.4, etc.
# 3. how big is the true second derivative of h0 itself
tj = damped_fn(xs)
print("true h0'' sup:", float(np.max(np.abs(tj[:, 2]))))

# 4. effective 4th derivative of h0's quintic segments: sample h0'' on a
# fine sub-grid of one segment near a ramp and fit curvature change
seg = np.linspace(0.25, 0.25 + h0.h_, 33) if hasattr(h0, "h_") else None
hstep = (1.0) / (h0.n - 1)
x0 = 0.25
seg = np.linspace(x0, x0 + hstep, 33)
s2 = h0.displacement_jets(seg, 2)[:, 2]
t2 = damped_fn(seg)[:, 2]
print("one segment h0'' range:", float(s2.max() - s2.min()),
      " true range:", float(t2.max() - t2.min()),
      " max err:", float(np.max(np.abs(s2 - t2))))
