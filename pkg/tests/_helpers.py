"""Shared builders and oracles for the test suite.

The polynomial oracles here work purely on coefficient arrays through
numpy's polynomial routines, so they share no code path with the
Faa di Bruno machinery they are used to check.
"""

import numpy as np
from numpy.polynomial import polynomial as P

from diffeolab import Diffeo1, from_preset


# Partition counts B_1..B_10, frozen from the classical recurrence
# B_{n+1} = sum_j C(n,j) B_j starting at B_0 = 1.
BELL = {1: 1, 2: 2, 3: 5, 4: 15, 5: 52, 6: 203,
        7: 877, 8: 4140, 9: 21147, 10: 115975}


def poly_compose(cf, cg):
    """Coefficients of f(g(x)) by Horner accumulation over f's coefficients."""
    cc = np.zeros(1)
    for a in reversed(np.asarray(cf, dtype=float)):
        cc = P.polymul(cc, np.asarray(cg, dtype=float))
        if cc.size == 0:
            cc = np.zeros(1)
        cc[0] += a
    return cc


def poly_derivs(c, x, k):
    """Derivative values of orders 0..k of the polynomial with coefficients c."""
    c = np.asarray(c, dtype=float)
    out = np.empty(k + 1)
    for i in range(k + 1):
        out[i] = P.polyval(x, c) if c.size else 0.0
        c = P.polyder(c) if c.size > 1 else np.zeros(1)
    return out


def series_invert(a, k):
    """Coefficients b_1..b_k of the series inverse of sum a_j x^j (a_0 = 0),
    solved order by order against the composition oracle."""
    a = np.asarray(a, dtype=float)[:k + 1]
    if abs(a[0]) > 0:
        raise ValueError("inversion oracle expects a_0 = 0")
    b = np.zeros(k + 1)
    b[1] = 1.0 / a[1]
    for n in range(2, k + 1):
        got = poly_compose(a, b)
        got = got[n] if got.size > n else 0.0
        # adding b_n changes the order-n composed coefficient by a_1 * b_n
        b[n] = -got / a[1]
    return b


def small_bump(eps, center=0.0, radius=1.0, k=2, n=513):
    return from_preset("smooth_bump_displacement",
                       {"eps": eps, "center": center, "radius": radius,
                        "k": k, "n": n})


def small_periodic(rng, k=2, eps=1e-4, n=257):
    """Two-harmonic periodic displacement with randomized amplitudes and
    phases, small enough for every operator under test."""
    xs = np.linspace(0.0, 1.0, n)
    w = 2.0 * np.pi
    a1 = rng.uniform(0.4, 1.0)
    a2 = 0.25 * rng.uniform(0.4, 1.0)
    p1 = rng.uniform(0.0, 2.0 * np.pi)
    p2 = rng.uniform(0.0, 2.0 * np.pi)
    jets = np.zeros((n, k + 1))
    for j in range(k + 1):
        jets[:, j] = eps * (a1 * w ** j * np.sin(w * xs + p1 + j * np.pi / 2)
                            + a2 * (2 * w) ** j
                            * np.sin(2 * w * xs + p2 + j * np.pi / 2))
    return Diffeo1("periodic", 0.0, 1.0, k, jets)


def c0_gap(f, g, lo, hi, n=2001):
    xs = np.linspace(lo, hi, n)
    return float(np.max(np.abs(f(xs) - g(xs))))
