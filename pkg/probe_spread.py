import numpy as np
from diffeolab.config import DEFAULT_TOL
from diffeolab.modulus import holder
from diffeolab.reduction import (make_config, roll_up, restrict_periodic,
                                 _ZETA, _sup_norms)
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
fu = compose(f, u, tol)
g = compose_all([Q, fu, Qi], tol)

def spread_pieces(h, label):
    k = h.k
    g0 = float(h(np.array(0.0)))
    hh = post_translate(h, -g0)
    binom = [[math.comb(j, i) for i in range(j + 1)] for j in range(k + 1)]
    def damped_fn(xs):
        zj = _ZETA.jets(xs, k)
        uj = hh.displacement_jets(xs, k)
        out = np.zeros_like(uj)
        for j in range(k + 1):
            for i in range(j + 1):
                out[..., j] += binom[j][i] * zj[..., i] * uj[..., j - i]
        return out
    h0 = _build_adaptive("periodic", hh.a, hh.a + 1.0, k, damped_fn,
                         max(257, hh.n), tol)
    h0i = inverse(h0, tol)
    h1 = compose(hh, h0i, tol)
    r1 = restrict_periodic(h1, (1.0, 2.0), tol)
    r0 = restrict_periodic(h0, (-1.5, -0.5), tol)
    out = compose(r1, r0, tol)
    print(label, "ns:", hh.n, h0.n, h1.n, r1.n, r0.n, out.n)
    return dict(h=hh, h0=h0, h0i=h0i, h1=h1, r1=r1, r0=r0, out=out)

A = spread_pieces(roll_up(g, tol), "coarse")
B = spread_pieces(roll_up(g, tol, n0=16385), "dense ")

rng = np.random.default_rng(7)
for key in ("h", "h0", "h0i", "h1", "r1", "r0", "out"):
    X, Y = A[key], B[key]
    lo, hi = (X.a, X.a + 1.0) if X.tail == "periodic" else (X.a, X.b)
    xs = rng.uniform(lo, hi, 20000)
    dx = X.displacement_jets(xs, 2) - Y.displacement_jets(xs, 2)
    print(f"{key:4s} coarse-vs-dense per order: " +
          " ".join(f"{float(np.max(np.abs(dx[:, j]))):.3e}" for j in range(3)))
