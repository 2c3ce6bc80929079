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
r = roll_up(g, tol)
h = post_translate(r, -float(r(np.array(0.0))))
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

def inv_fn(ys):
    xx = h0.inverse_values(ys, tol.invert_abscissa)
    fj = h0.jet_at(xx, k)
    out = invert_derivs(fj, xx)
    out[..., 0] -= ys
    out[..., 1] -= 1.0
    return out

ys = np.linspace(0.2540, 0.2560, 1601)
iv = inv_fn(ys)[:, 2]
print("inv_fn'' on scan: min %.4e max %.4e range %.4e"
      % (iv.min(), iv.max(), iv.max() - iv.min()))
# successive second differences to reveal texture scale
d1 = np.abs(np.diff(iv))
print("per-sample |diff| median %.2e  q99 %.2e  max %.2e"
      % (np.median(d1), np.quantile(d1, 0.99), d1.max()))
jumpers = ys[np.argsort(d1)[-6:]]
print("largest jumps at y:", np.sort(np.round(jumpers, 6)))
print("h0 grid spacing:", 1.0 / (h0.n - 1))

# compare h0'' texture on the x-side of this window
xx = h0.inverse_values(ys, tol.invert_abscissa)
hx = h0.jet_at(xx, 2)[:, 2]
print("h0'' along preimages: range %.4e" % (hx.max() - hx.min()))

# Newton abscissa jitter: residual after solve
res = np.abs(h0(xx) - ys)
print("solve residual max:", res.max())

# smoothness of xx itself: second differences of preimage sequence
sd = np.abs(np.diff(xx, 2))
print("preimage 2nd-diff median %.2e max %.2e  (smooth would be ~%.1e)"
      % (np.median(sd), sd.max(), (ys[1]-ys[0])**2 * 1e-3))
