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
h0i = inverse(h0, tol)

def inv_fn(ys):
    xx = h0.inverse_values(ys, tol.invert_abscissa)
    fj = h0.jet_at(xx, k)
    out = invert_derivs(fj, xx)
    out[..., 0] -= ys
    out[..., 1] -= 1.0
    return out

n = h0i.n
ys_nodes = np.linspace(0.0, 1.0, n)
i0 = int(round(0.2547 * (n - 1)))
idx = np.arange(i0 - 3, i0 + 4)
fresh = inv_fn(ys_nodes[idx])
for j, i in enumerate(idx):
    st = h0i.jets[i]
    fr = fresh[j]
    print(f"node {i} y={ys_nodes[i]:.6f}: stored j2={st[2]:+.6e} "
          f"fresh j2={fr[2]:+.6e}  d(val)={st[0]-fr[0]:+.1e} "
          f"d(j1)={st[1]-fr[1]:+.1e} d(j2)={st[2]-fr[2]:+.1e}")
