"""Rolling-up, spreading, and norm-reduction operators.

The pipeline has three legs.  ``roll_up`` mixes a small compactly
supported diffeomorphism with the unit translation, producing a map
that commutes with integer shifts (a circle map).  ``spread`` runs the
other way: it cuts a small circle map into discrete-isotopy factors
and plants each factor, through a window restriction, on its own slot
of a fixed compact interval.  ``reduce_norm`` composes the two legs;
its output lives on the fixed target interval no matter how wide the
input's support was, and the measured norm ratio is the quantity the
fixed-point experiment feeds on.

A limit word of two rolled-up maps detects conjugacy: when the rolled
maps differ by a translation, ``lambda_limit`` realizes the limit as
an eventually periodic diffeomorphism, and ``conjugator`` cuts it down
to a compactly supported conjugacy witness through the plateau-flow
chart, emitting a verifiable certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._taylor import compose_affine, coeffs_to_derivs, smoothstep_series
from .config import DEFAULT_TOL, Tolerances, smallness_threshold
from .diffeo import (Diffeo1, _build_adaptive, compose, compose_all, inverse,
                     post_translate, refined_grid, support_interval,
                     translate_conjugate)
from .errors import ConstructionError, PreconditionError
from .flow import PlateauField, time_t_map, trajectory_chart
from .jets import compose_derivs, invert_derivs
from .norms import SlackReport, holder_norm

__all__ = [
    "PlateauBump", "zeta_profile", "MatherConfig", "make_config",
    "roll_word", "roll_params", "roll_up", "roll_norm_check",
    "roll_equivariance_residual", "restrict_periodic", "spread_once",
    "blend_toward_identity", "isotopy_step", "spread",
    "PsiResult", "reduce_norm", "reduction_sweep",
    "LambdaResult", "lambda_limit", "ConjugacyCertificate", "conjugator",
    "disjoint_product_check", "blend_excess",
]


# -- the periodic cutoff profile --------------------------------------------

class PlateauBump:
    """1-periodic C^inf profile: 1 on [-1/10, 1/10] + Z, 0 on the windows
    of the same width around half-integers, monotone smoothstep ramps of
    width 3/10 in between."""

    PLATEAU = 0.1
    ZERO_LO = 0.4
    ZERO_HI = 0.6
    WIDTH = 0.3

    def __init__(self):
        self._slope_sup = None

    def jets(self, x, order: int) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        t = np.mod(x, 1.0)
        out = np.zeros(x.shape + (order + 1,))
        ones = (t <= self.PLATEAU) | (t >= 1.0 - self.PLATEAU)
        out[ones, 0] = 1.0
        down = (t > self.PLATEAU) & (t < self.ZERO_LO)
        if down.any():
            y = (self.ZERO_LO - t[down]) / self.WIDTH
            c = compose_affine(smoothstep_series(y, order), -1.0 / self.WIDTH)
            out[down] = coeffs_to_derivs(c)
        up = (t > self.ZERO_HI) & (t < 1.0 - self.PLATEAU)
        if up.any():
            y = (t[up] - self.ZERO_HI) / self.WIDTH
            c = compose_affine(smoothstep_series(y, order), 1.0 / self.WIDTH)
            out[up] = coeffs_to_derivs(c)
        return out

    def __call__(self, x) -> np.ndarray:
        return self.jets(x, 0)[..., 0]

    @property
    def slope_sup(self) -> float:
        if self._slope_sup is None:
            xs = np.linspace(0.0, 1.0, 8193)
            self._slope_sup = float(np.max(np.abs(self.jets(xs, 1)[:, 1])))
        return self._slope_sup


_ZETA = PlateauBump()


def zeta_profile() -> PlateauBump:
    return _ZETA


def spreading_smallness() -> float:
    """The C^1 gate for the spreading leg: one hundredth of the reciprocal
    of (1 + sup zeta + sup zeta')."""
    return 1.0 / (100.0 * (2.0 + _ZETA.slope_sup))


# -- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class MatherConfig:
    """Geometry and smallness knobs of one norm-reduction pipeline."""

    k: int
    alpha: object                   # concave modulus, callable
    A: int
    B: int                          # number of spreading slots
    D: tuple[float, float]          # target support interval
    E: tuple[float, float]          # source support interval
    eps0: float                     # C^1 gate for spreading
    delta0: float                   # C^{k,alpha} ball radius for the pipeline

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "alpha": self.alpha.to_dict() if hasattr(self.alpha, "to_dict")
                     else str(self.alpha),
            "A": self.A, "B": self.B,
            "D": list(self.D), "E": list(self.E),
            "eps0": self.eps0, "delta0": self.delta0,
        }


def make_config(k: int, alpha, A: int, eps0: float | None = None,
                delta0: float | None = None) -> MatherConfig:
    """Geometry rule: for k >= 2 the target is the fixed interval [-2,2]
    and the source widens with A; for k = 1 the roles swap and the number
    of spreading slots grows with A instead."""
    if k < 1:
        raise ValueError("jet order must be at least 1")
    if A < 1 or A != int(A):
        raise ValueError("the width parameter must be a positive integer")
    A = int(A)
    if k >= 2:
        B, D, E = 1, (-2.0, 2.0), (-2.0 * A, 2.0 * A)
    else:
        B, D, E = A, (-2.0 * A, 2.0 * A), (-2.0, 2.0)
    if eps0 is None:
        eps0 = spreading_smallness()
    if not 0.0 < eps0 < 1e-2:
        raise ValueError("the C^1 gate must sit strictly below 1/100")
    if delta0 is None:
        delta0 = smallness_threshold(k)
    if delta0 <= 0.0:
        raise ValueError("ball radius must be positive")
    return MatherConfig(k=k, alpha=alpha, A=A, B=B, D=D, E=E,
                        eps0=eps0, delta0=delta0)


# -- rolling up ---------------------------------------------------------------

def _sup_norms(f: Diffeo1, density: int = 8) -> tuple[float, float]:
    """(sup |u|, sup |u'|) of the displacement on a dense grid."""
    xs = refined_grid(f, density)
    uj = f.displacement_jets(xs, min(1, f.k))
    s0 = float(np.max(np.abs(uj[:, 0])))
    s1 = float(np.max(np.abs(uj[:, 1]))) if f.k >= 1 else 0.0
    return s0, s1


def roll_word(g: Diffeo1, x, r, s: int, order: int | None = None) -> np.ndarray:
    """Full-map jets of the word (shift by r-s) o (Tg)^s o (shift by -r)
    at the points x; r may be a scalar or per-point."""
    order = g.k if order is None else order
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = np.asarray(r, dtype=float)
    Y = np.zeros(x.shape + (order + 1,))
    Y[..., 0] = x - r
    Y[..., 1] = 1.0
    for _ in range(int(s)):
        Y = compose_derivs(g.jet_at(Y[..., 0], order), Y)
        Y[..., 0] += 1.0
    Y[..., 0] += r - float(s)
    return Y


def roll_params(g: Diffeo1, density: int = 8):
    """(inf supp, support length, sup displacement, word length) used by
    the rolling-up word."""
    if g.tail != "compact":
        raise PreconditionError("rolling up needs a compactly supported map")
    supp = support_interval(g)
    if supp is None:
        return float(g.a), 0.0, 0.0, 1
    a, _ = _sup_norms(g, density)
    if a >= 1.0:
        raise PreconditionError(
            f"displacement sup {a:.3f} reaches 1; the word does not advance")
    length = supp[1] - supp[0]
    s = int(math.ceil((length + 1.0) / (1.0 - a)))
    return float(supp[0]), float(length), a, s


def roll_up(g: Diffeo1, tol: Tolerances | None = None,
            n0: int | None = None) -> Diffeo1:
    """Mix g with the unit translation into a map commuting with integer
    shifts.  Exact on the identity; for small g the displacement of the
    output is bounded by (word length) * (displacement sup)."""
    tol = tol or DEFAULT_TOL
    inf_supp, _, _, s = roll_params(g)
    if s > tol.word_cap:
        raise ConstructionError(f"word length {s} exceeds the cap")
    k = g.k

    def fn(xs: np.ndarray) -> np.ndarray:
        r = np.ceil(xs - inf_supp)
        out = roll_word(g, xs, r, s, k)
        out[..., 0] -= xs
        out[..., 1] -= 1.0
        return out

    if n0 is None:
        n0 = max(129, min(g.n, 4097))
    return _build_adaptive("periodic", 0.0, 1.0, k, fn, n0, tol)


def roll_norm_check(f: Diffeo1, cfg: MatherConfig,
                    tol: Tolerances | None = None) -> SlackReport:
    """Measure the rolled-up map's top seminorm against the linear bound
    4 (support length + 1) times the input's seminorm."""
    tol = tol or DEFAULT_TOL
    norm_f = holder_norm(f, cfg.alpha, cfg.k)
    if norm_f > cfg.delta0:
        raise PreconditionError(
            f"seminorm {norm_f:.3e} exceeds the ball radius {cfg.delta0:.1e}")
    supp = support_interval(f)
    length = 0.0 if supp is None else supp[1] - supp[0]
    factor = 4.0 * (length + 1.0)
    gf = roll_up(f, tol)
    norm_gf = holder_norm(gf, cfg.alpha, cfg.k)
    slack = tol.estimator_slack
    return SlackReport(
        name="roll-up-norm",
        constants={"factor": factor},
        values={"norm_in": norm_f, "norm_rolled": norm_gf},
        slacks={"norm": factor * norm_f * (1.0 + slack) - norm_gf})


def roll_equivariance_residual(g: Diffeo1, b: float,
                               tol: Tolerances | None = None) -> float:
    """Sup distance between roll_up of the b-shifted conjugate and the
    b-shifted conjugate of roll_up."""
    tol = tol or DEFAULT_TOL
    lhs = roll_up(translate_conjugate(g, b), tol)
    rhs = translate_conjugate(roll_up(g, tol), b)
    xs = np.linspace(rhs.a, rhs.a + 1.0, 1025)
    return float(np.max(np.abs(lhs(xs) - rhs(xs))))


# -- window restriction and spreading ----------------------------------------

def restrict_periodic(h: Diffeo1, window: tuple[float, float],
                      tol: Tolerances | None = None) -> Diffeo1:
    """Cut one unit window out of a periodic map: the result agrees with h
    on the window and is the identity outside.  Refuses unless h fixes the
    window ends with all displacement jets vanishing there."""
    tol = tol or DEFAULT_TOL
    if h.tail != "periodic":
        raise PreconditionError("window restriction applies to periodic maps")
    a, b = float(window[0]), float(window[1])
    if abs((b - a) - 1.0) > 1e-12:
        raise PreconditionError("the restriction window must have unit length")
    edges = np.array([a, b])
    ej = h.displacement_jets(edges, h.k)
    worst = float(np.max(np.abs(ej)))
    if worst > tol.surgery_boundary:
        raise PreconditionError(
            f"window ends are not fixed to all orders: jet residual "
            f"{worst:.3e} exceeds {tol.surgery_boundary:.1e}")
    n = max(129, h.n)
    xs = np.linspace(a, b, n)
    jets = h.displacement_jets(xs, h.k)
    jets[0] = 0.0
    jets[-1] = 0.0
    return Diffeo1("compact", a, b, h.k, jets, tol=tol)


def spread_once(g: Diffeo1, cfg: MatherConfig,
                tol: Tolerances | None = None) -> Diffeo1:
    """One-slot spreading: recenter g to fix 0, damp it to the identity
    through the periodic cutoff, and plant the two factors on [-3/2,-1/2]
    and [1,2].  The output is supported in [-3/2, 2] and rolls back up to
    the recentered input."""
    tol = tol or DEFAULT_TOL
    if g.tail != "periodic":
        raise PreconditionError("spreading applies to periodic maps")
    k = g.k
    g0 = float(g(np.array(0.0)))
    h = post_translate(g, -g0)
    sup0, sup1 = _sup_norms(h)
    if sup1 > cfg.eps0:
        raise PreconditionError(
            f"slope deviation {sup1:.3e} exceeds the spreading gate "
            f"{cfg.eps0:.3e}")
    if sup0 > 0.05:
        raise ConstructionError(
            "recentered displacement too large for the fixed-window argument")

    binom = [[math.comb(j, i) for i in range(j + 1)] for j in range(k + 1)]

    def damped_fn(xs: np.ndarray) -> np.ndarray:
        zj = _ZETA.jets(xs, k)
        uj = h.displacement_jets(xs, k)
        out = np.zeros_like(uj)
        for j in range(k + 1):
            for i in range(j + 1):
                out[..., j] += binom[j][i] * zj[..., i] * uj[..., j - i]
        return out

    h0 = _build_adaptive("periodic", h.a, h.a + 1.0, k, damped_fn,
                         max(257, h.n), tol)
    h1 = compose(h, inverse(h0, tol), tol)

    win = np.linspace(-0.05, 0.05, 65)
    fix1 = float(np.max(np.abs(h1(win) - win)))
    fix0 = float(np.max(np.abs(h0(win + 0.5) - (win + 0.5))))
    if max(fix0, fix1) > tol.window_fix:
        raise ConstructionError(
            f"fixed-window residual {max(fix0, fix1):.3e} exceeds "
            f"{tol.window_fix:.1e}; the damped factors do not separate")

    r1 = restrict_periodic(h1, (1.0, 2.0), tol)
    r0 = restrict_periodic(h0, (-1.5, -0.5), tol)
    return compose(r1, r0, tol)


def blend_toward_identity(h: Diffeo1, t: float) -> Diffeo1:
    """The convex blend keeping a fraction t of h's displacement."""
    if h.tail != "periodic":
        raise PreconditionError("blending is defined for periodic maps")
    if not 0.0 <= t <= 1.0:
        raise ValueError("blend fraction must lie in [0, 1]")
    return Diffeo1("periodic", h.a, h.b, h.k, h.jets * t)


def isotopy_step(h: Diffeo1, B: int, i: int,
                 tol: Tolerances | None = None) -> Diffeo1:
    """The i-th of B discrete-isotopy factors from the identity to h:
    the blend at i/B composed with the inverse blend at (i-1)/B."""
    tol = tol or DEFAULT_TOL
    if not 1 <= i <= B:
        raise ValueError("factor index out of range")
    if abs(float(h(np.array(0.0)))) > tol.node_zero:
        raise PreconditionError("the isotopy needs a map fixing 0")
    _, sup1 = _sup_norms(h)
    if sup1 >= 1.0:
        raise PreconditionError("slope deviation reaches 1; blends may fold")
    gi = blend_toward_identity(h, i / B)
    if i == 1:
        return gi
    return compose(gi, inverse(blend_toward_identity(h, (i - 1) / B), tol),
                   tol)


def spread(g: Diffeo1, cfg: MatherConfig,
           tol: Tolerances | None = None) -> Diffeo1:
    """Multi-slot spreading: plant the B discrete-isotopy factors of the
    recentered map on disjoint slots four units apart.  Supported in
    [-2B, 2B]; rolling the output back up recovers the recentered input."""
    tol = tol or DEFAULT_TOL
    if g.tail != "periodic":
        raise PreconditionError("spreading applies to periodic maps")
    B = cfg.B
    g0 = float(g(np.array(0.0)))
    h = post_translate(g, -g0)
    factors = []
    for i in range(B, 0, -1):
        hi = isotopy_step(h, B, i, tol)
        wi = spread_once(hi, cfg, tol)
        factors.append(translate_conjugate(wi, float(-2 * B - 2 + 4 * i)))
    out = factors[0] if B == 1 else compose_all(factors, tol)
    supp = support_interval(out)
    if supp is not None and (supp[0] < -2.0 * B - out.h
                             or supp[1] > 2.0 * B + out.h):
        raise ConstructionError("spread support leaked outside the target")
    return out


# -- the norm-reduction step --------------------------------------------------

@dataclass(frozen=True)
class PsiResult:
    """One norm-reduction application with its measured norms."""

    map: Diffeo1
    norm_in: float
    norm_out: float
    rolled_slope: float             # C^1 size of the rolled-up midpoint
    support: tuple[float, float] | None

    @property
    def ratio(self) -> float:
        return self.norm_out / self.norm_in if self.norm_in > 0 else 0.0

    def to_dict(self) -> dict:
        return {"norm_in": self.norm_in, "norm_out": self.norm_out,
                "ratio": self.ratio, "rolled_slope": self.rolled_slope,
                "support": None if self.support is None else
                list(self.support)}


def reduce_norm(g: Diffeo1, cfg: MatherConfig,
                tol: Tolerances | None = None) -> PsiResult:
    """Roll g up and spread it back onto the target interval.  The output
    is supported in cfg.D regardless of where g lived inside cfg.E, and
    represents the same first-homology class."""
    tol = tol or DEFAULT_TOL
    if g.tail != "compact":
        raise PreconditionError("the reduction step needs a compact map")
    supp = support_interval(g)
    if supp is not None and (supp[0] < cfg.E[0] - g.h
                             or supp[1] > cfg.E[1] + g.h):
        raise PreconditionError(
            f"support {supp} is not inside the source interval {cfg.E}")
    norm_in = holder_norm(g, cfg.alpha, cfg.k)
    if norm_in > cfg.delta0:
        raise PreconditionError(
            f"seminorm {norm_in:.3e} exceeds the ball radius "
            f"{cfg.delta0:.1e}")
    rolled = roll_up(g, tol)
    _, rolled_slope = _sup_norms(rolled)
    out = spread(rolled, cfg, tol)
    norm_out = holder_norm(out, cfg.alpha, cfg.k)
    return PsiResult(map=out, norm_in=norm_in, norm_out=norm_out,
                     rolled_slope=rolled_slope,
                     support=support_interval(out))


def sweep_profile(A: int, k: int = 2, eps: float = 4e-6,
                  phase: float = 0.3) -> Diffeo1:
    """The fixed sweep family member for width A: a unit-frequency sine
    displacement under a smooth plateau envelope filling the source
    interval.  Unit-scale oscillation across the whole interval is what
    makes the rolled-up copies add coherently, so the measured reduction
    ratio exhibits the source-over-target width factor instead of
    collapsing by cancellation."""
    hi = 2.0 * A - 0.05
    lo_plat = hi - 1.0
    n = int(round(256.0 * 2.0 * hi)) + 1
    xs = np.linspace(-hi, hi, n)
    env = np.zeros((n, k + 1))
    absx = np.abs(xs)
    env[absx <= lo_plat, 0] = 1.0
    ramp = (absx > lo_plat) & (absx < hi)
    if ramp.any():
        c = compose_affine(smoothstep_series(hi - absx[ramp], k), -1.0)
        dv = coeffs_to_derivs(c)
        sgn = np.where(xs[ramp][:, None] < 0.0,
                       (-1.0) ** np.arange(k + 1)[None, :], 1.0)
        env[ramp] = dv * sgn
    w = 2.0 * np.pi
    car = np.empty((n, k + 1))
    for j in range(k + 1):
        car[:, j] = eps * w ** j * np.sin(w * xs + phase + j * np.pi / 2.0)
    jets = np.zeros((n, k + 1))
    for j in range(k + 1):
        for i in range(j + 1):
            jets[:, j] += math.comb(j, i) * env[:, i] * car[:, j - i]
    jets[0] = 0.0
    jets[-1] = 0.0
    return Diffeo1("compact", -hi, hi, k, jets)


def rescale_factor(alpha, A: int, k: int) -> float:
    """The exact norm scaling of conjugation by x -> A x on the top
    seminorm: A^(1-k) times the largest value of alpha(s/A)/alpha(s)."""
    s = np.logspace(-6.0, 3.0, 241)
    sup = float(np.max(np.asarray(alpha(s / A)) / np.asarray(alpha(s))))
    return float(A) ** (1 - k) * sup


def reduction_sweep(A_values, k: int, alpha, eps: float = 4e-6,
                    phase: float = 0.3,
                    tol: Tolerances | None = None) -> list[dict]:
    """Measure the reduction step on the fixed sweep family at each width.
    The plain ratio (output seminorm over input seminorm) tracks the
    width factor of the reduction bound; multiplying by the exact
    rescaling factor of conjugation back to the target interval gives the
    contraction number the fixed-point iteration sees per application."""
    tol = tol or DEFAULT_TOL
    rows = []
    for A in A_values:
        A = int(A)
        cfg = make_config(k, alpha, A)
        res = reduce_norm(sweep_profile(A, k, eps, phase), cfg, tol)
        resc = rescale_factor(alpha, A, k)
        rows.append({
            "A": A,
            "norm_in": res.norm_in,
            "norm_out": res.norm_out,
            "plain_ratio": res.ratio,
            "rescale_factor": resc,
            "ratio": res.ratio * resc,
            "rolled_slope": res.rolled_slope,
        })
    return rows


# -- the limit word and the conjugacy certificate ------------------------------

@dataclass(frozen=True)
class LambdaResult:
    """The limit word of two rolled-up maps, with its diagnostics."""

    map: Diffeo1
    word_length: int
    tail_residual: float            # against rolled-v o rolled-u^{-1}
    intertwine_residual: float      # shifted-u vs shifted-v equivariance

    def to_dict(self) -> dict:
        return {"word_length": self.word_length,
                "tail_residual": self.tail_residual,
                "intertwine_residual": self.intertwine_residual}


def _check_pair(u: Diffeo1, v: Diffeo1, cfg: MatherConfig):
    J = 2.0 * cfg.A
    for name, f in (("first", u), ("second", v)):
        if f.tail != "compact":
            raise PreconditionError(f"the {name} map must be compact")
        supp = support_interval(f)
        if supp is not None and (supp[0] < -J - f.h or supp[1] > J + f.h):
            raise PreconditionError(
                f"the {name} map is supported outside [-2A, 2A]")


def lambda_limit(u: Diffeo1, v: Diffeo1, cfg: MatherConfig,
                 tol: Tolerances | None = None) -> LambdaResult:
    """The stabilized word (shifted v)^s (shifted u)^{-s}: the identity
    left of -2A, and the quotient of the rolled-up maps right of
    2A + 1/2.  Conjugating the unit shift by it carries shifted-u words
    to shifted-v words."""
    tol = tol or DEFAULT_TOL
    _check_pair(u, v, cfg)
    if u.k != v.k:
        raise ValueError("operands carry different jet orders")
    k = u.k
    A = cfg.A
    au, _ = _sup_norms(u)
    av, _ = _sup_norms(v)
    a = max(au, av)
    if a >= 1.0:
        raise PreconditionError("displacement sup reaches 1")
    lo = -2.0 * A
    hi = 2.0 * A + 2.5
    u_inv = inverse(u, tol)

    s = int(math.ceil((4.0 * A + 1.5) / (1.0 - a)))
    while True:
        y = hi
        for _ in range(s):
            y = float(u_inv(np.array(y - 1.0)))
        if y <= -2.0 * A:
            break
        s += int(math.ceil((y + 2.0 * A) / (1.0 - a))) + 1
        if s > tol.word_cap:
            raise ConstructionError(f"word length {s} exceeds the cap")

    def fn(xs: np.ndarray) -> np.ndarray:
        Y = np.zeros(xs.shape + (k + 1,))
        Y[..., 0] = xs
        Y[..., 1] = 1.0
        for _ in range(s):
            Y[..., 0] -= 1.0
            Y = compose_derivs(u_inv.jet_at(Y[..., 0], k), Y)
        for _ in range(s):
            Y = compose_derivs(v.jet_at(Y[..., 0], k), Y)
            Y[..., 0] += 1.0
        Y[..., 0] -= xs
        Y[..., 1] -= 1.0
        return Y

    n0 = max(257, int(round(256.0 * (hi - lo))) + 1)
    lam = _build_adaptive("ep", lo, hi, k, fn, n0, tol)

    xs_t = np.linspace(2.0 * A + 0.5, 2.0 * A + 1.5, 257)
    quot = compose(roll_up(v, tol), inverse(roll_up(u, tol), tol), tol)
    tail_residual = float(np.max(np.abs(lam(xs_t) - quot(xs_t))))

    xs_w = np.linspace(-2.0 * A - 2.0, 2.0 * A + 3.0, 1025)
    lhs = v(lam(xs_w)) + 1.0
    rhs = lam(u(xs_w) + 1.0)
    intertwine = float(np.max(np.abs(lhs - rhs)))
    if intertwine > tol.intertwine:
        raise ConstructionError(
            f"intertwining residual {intertwine:.3e} exceeds "
            f"{tol.intertwine:.1e}")
    return LambdaResult(map=lam, word_length=2 * s,
                        tail_residual=tail_residual,
                        intertwine_residual=intertwine)


@dataclass(frozen=True)
class ConjugacyCertificate:
    """A compactly supported witness lam with tau o v = lam o tau o u o
    lam^{-1}, checkable by resampling."""

    b: float                        # translation separating the rolled maps
    tau: Diffeo1                    # unit-time plateau-flow map
    lam: Diffeo1                    # the witness, supported in [-2A, 2A+1]
    residual: float                 # sup distance of the two sides
    overlaps: dict                  # piecewise-assembly agreement
    word_length: int
    translation_dev: float          # deviation of the rolled quotient from T_b
    config: dict

    def to_dict(self) -> dict:
        from .diffeo import to_dict as map_dict
        return {"b": self.b, "residual": self.residual,
                "overlaps": dict(self.overlaps),
                "word_length": self.word_length,
                "translation_dev": self.translation_dev,
                "tau": map_dict(self.tau), "lam": map_dict(self.lam),
                "config": dict(self.config)}


def conjugator(u: Diffeo1, v: Diffeo1, cfg: MatherConfig,
               tol: Tolerances | None = None,
               field: PlateauField | None = None,
               chart=None, tau: Diffeo1 | None = None) -> ConjugacyCertificate:
    """Build the compactly supported conjugacy witness for a pair whose
    rolled-up maps differ by a translation.  Piecewise: the identity left
    of -2A, the chart conjugate of the limit word in the middle, and the
    time-b flow map right of 2A + 1/2; the pieces are checked to agree on
    the overlaps before assembly."""
    tol = tol or DEFAULT_TOL
    _check_pair(u, v, cfg)
    k = u.k
    A = cfg.A

    gu = roll_up(u, tol)
    gv = roll_up(v, tol)
    quot = compose(gv, inverse(gu, tol), tol)
    xs_p = np.linspace(quot.a, quot.a + 1.0, 2049)
    tvals = quot(xs_p) - xs_p
    b = float(np.mean(tvals))
    dev = float(np.max(np.abs(tvals - b)))
    if dev > tol.tol_b:
        raise PreconditionError(
            f"rolled-up maps differ by a non-translation: deviation "
            f"{dev:.3e} exceeds {tol.tol_b:.1e}")

    lam_res = lambda_limit(u, v, cfg, tol)
    Lam = lam_res.map

    field = field or PlateauField(A)
    chart = chart or trajectory_chart(field, k, tol=tol)
    tau = tau or time_t_map(field, 1.0, k, tol=tol)
    tau_b = time_t_map(field, b, k, tol=tol)
    cut = 2.0 * A + 0.75

    def chart_side(xs: np.ndarray) -> np.ndarray:
        ys = chart.inverse_value(xs)
        Ji = invert_derivs(chart.jet_at(ys, k), ys)
        J2 = compose_derivs(Lam.jet_at(Ji[..., 0], k), Ji)
        return compose_derivs(chart.jet_at(J2[..., 0], k), J2)

    def fn(xs: np.ndarray) -> np.ndarray:
        out = np.empty(xs.shape + (k + 1,))
        mid = xs <= cut
        if mid.any():
            out[mid] = chart_side(xs[mid])
        if (~mid).any():
            out[~mid] = tau_b.jet_at(xs[~mid], k)
        out[..., 0] -= xs
        out[..., 1] -= 1.0
        return out

    attained = chart.attained
    xs_r = np.linspace(2.0 * A + 0.55, min(2.0 * A + 0.95, attained - 0.02),
                       101)
    right = float(np.max(np.abs(chart_side(xs_r)[..., 0] - tau_b(xs_r))))
    xs_l = np.linspace(max(-attained + 0.02, -2.0 * A - 0.95), -2.0 * A, 101)
    left = float(np.max(np.abs(chart_side(xs_l)[..., 0] - xs_l)))
    if max(left, right) > tol.overlap:
        raise ConstructionError(
            f"piecewise overlap residual {max(left, right):.3e} exceeds "
            f"{tol.overlap:.1e}")

    n0 = max(257, int(round(256.0 * (4.0 * A + 1.0))) + 1)
    lam = _build_adaptive("compact", -2.0 * A, 2.0 * A + 1.0, k, fn, n0, tol)

    lam_inv = inverse(lam, tol)
    xs_c = np.linspace(-2.0 * A - 2.0, 2.0 * A + 2.0, 2049)
    lhs = tau(v(xs_c))
    rhs = lam(tau(u(lam_inv(xs_c))))
    residual = float(np.max(np.abs(lhs - rhs)))

    return ConjugacyCertificate(
        b=b, tau=tau, lam=lam, residual=residual,
        overlaps={"left": left, "right": right},
        word_length=lam_res.word_length, translation_dev=dev,
        config=cfg.to_dict())


# -- supporting estimates -------------------------------------------------------

def disjoint_product_check(factors: list[Diffeo1], alpha,
                           k: int | None = None,
                           tol: Tolerances | None = None) -> SlackReport:
    """Product of maps with pairwise disjoint supports: top seminorm at
    most twice the largest factor seminorm."""
    tol = tol or DEFAULT_TOL
    if len(factors) < 2:
        raise ValueError("need at least two factors")
    k = factors[0].k if k is None else k
    supports = [support_interval(f) for f in factors]
    spans = [s for s in supports if s is not None]
    spans.sort()
    for left, rite in zip(spans, spans[1:]):
        if left[1] > rite[0] + 1e-12:
            raise PreconditionError("supports overlap")
    prod = compose_all(factors, tol)
    norm_prod = holder_norm(prod, alpha, k)
    worst = max(holder_norm(f, alpha, k) for f in factors)
    return SlackReport(
        name="disjoint-product",
        constants={"factor": 2.0},
        values={"norm_product": norm_prod, "max_factor": worst},
        slacks={"norm": 2.0 * worst * (1.0 + tol.estimator_slack)
                - norm_prod})


def blend_excess(u: Diffeo1, t: float, alpha, k: int | None = None,
                 tol: Tolerances | None = None) -> dict:
    """Measured data for the convex-blend bound: composing u with the
    inverse blend at fraction t costs (1-t) of u's norm plus a quadratic
    excess.  Returns the ingredients for a batch fit of the quadratic
    constant."""
    tol = tol or DEFAULT_TOL
    if u.tail != "periodic":
        raise PreconditionError("the blend bound concerns periodic maps")
    k = u.k if k is None else k
    norm_u = holder_norm(u, alpha, k)
    w = compose(u, inverse(blend_toward_identity(u, t), tol), tol)
    norm_w = holder_norm(w, alpha, k)
    excess = norm_w - (1.0 - t) * norm_u
    return {"t": t, "norm_u": norm_u, "norm_blend": norm_w,
            "excess": excess}
