import numpy as np
from diffeolab.config import DEFAULT_TOL
from diffeolab.modulus import holder
from diffeolab.reduction import make_config, roll_up, _ZETA
import diffeolab.fixpoint as FP
from diffeolab.diffeo import (identity, inverse, compose_all, compose,
                              post_translate, _build_adaptive)
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
h0i = inverse(h0, tol)

n = h0i.n
ys = np.linspace(0.0, 1.0, n)
i0 = int(round(0.2547 * (n - 1)))
np.set_printoptions(precision=17)
for i in range(i0 - 2, i0 + 3):
    v = h0i.jets[i]
    print(f"node {i} y={ys[i]:.10f}  v={v[0]:+.17e} d1={v[1]:+.12e} "
          f"d2={v[2]:+.12e}")

hh = ys[1] - ys[0]
vv = h0i.jets[i0 - 2:i0 + 3, 0]
dd2 = np.diff(vv, 2) / hh**2
print("value-based 2nd differences:", dd2)
print("(should match d2 column ~ -5.4e-07)")

# evaluate build j2 densely inside cell [i0, i0+1]
xs = np.linspace(ys[i0], ys[i0 + 1], 41)
j2 = h0i.displacement_jets(xs, 2)[:, 2]
print("cell j2 profile min/max:", j2.min(), j2.max())
print("end values:", j2[0], j2[-1])
