"""Norms, seminorms, and metrics for one-dimensional maps.

Conventions: for a function phi, ``|phi|_k`` is the sup of the k-th
derivative alone, and ``|phi|_{k,alpha}`` is the concave-modulus Holder
seminorm of the k-th derivative.  For maps f, g the metrics take sups
over derivative orders of the differences.  Displacements are used
throughout, which changes nothing for k >= 1 since constants drop out
of seminorms and derivative sups.

Holder seminorms are estimated from below: for each of a ladder of
dyadic separations between the sample step and the window width, the
sup over all aligned sample pairs is taken.  Estimates therefore never
exceed the true seminorm, and inequality checks allow a small
estimator slack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .diffeo import Diffeo1, inverse as _inverse, support_interval
from .errors import PreconditionError

_MAX_SAMPLES = 1 << 19


# -- sampling ----------------------------------------------------------------

def eval_window(f: Diffeo1, margin: float | None = None) -> tuple[float, float]:
    """Interval on which sup norms and pair sups of f's displacement are
    computed; covers the grid plus a margin (periodic maps: two periods)."""
    if f.tail == "periodic":
        return (f.a, f.a + 2.0)
    if margin is None:
        margin = min(2.0, 0.25 * (f.b - f.a)) + 2.0 * f.h
    if f.tail == "ep":
        return (f.a - margin, f.b + margin)
    return (f.a - margin, f.b + margin)


def pair_window(f: Diffeo1, g: Diffeo1) -> tuple[float, float]:
    wf, wg = eval_window(f), eval_window(g)
    return (min(wf[0], wg[0]), max(wf[1], wg[1]))


def sample_points(window: tuple[float, float], step: float) -> np.ndarray:
    lo, hi = window
    m = int(np.ceil((hi - lo) / step)) + 1
    m = min(max(m, 16), _MAX_SAMPLES)
    return np.linspace(lo, hi, m)


def _step_for(f: Diffeo1, density: int) -> float:
    return f.h / density


# -- Holder estimator --------------------------------------------------------

def holder_seminorm_samples(vals: np.ndarray, step: float, alpha,
                            scales: int = 24) -> float:
    """Lower estimate of [phi]_alpha from uniform samples of phi."""
    m = len(vals)
    if m < 2:
        return 0.0
    strides = []
    s = 1
    while s <= m - 1 and len(strides) < scales - 1:
        strides.append(s)
        s *= 2
    if strides[-1] != m - 1:
        strides.append(m - 1)
    best = 0.0
    for s in strides:
        gap = float(np.max(np.abs(vals[s:] - vals[:-s])))
        best = max(best, gap / float(alpha(s * step)))
    return best


def holder_norm(f: Diffeo1, alpha, k: int | None = None,
                density: int | None = None) -> float:
    """The seminorm [f^{(k)}]_alpha, estimated on a dense grid."""
    k = f.k if k is None else k
    density = DEFAULT_TOL.eval_density if density is None else density
    step = _step_for(f, density)
    xs = sample_points(eval_window(f), step)
    vals = f.displacement_jets(xs, k)[:, k]
    return holder_seminorm_samples(vals, xs[1] - xs[0], alpha)


# -- reports -----------------------------------------------------------------

@dataclass(frozen=True)
class NormReport:
    k: int
    alpha_label: str
    window: tuple[float, float]
    samples: int
    sup_dev: tuple[float, ...]      # |f - Id|_i for i = 0..k
    holder_dev: tuple[float, ...]   # [f^{(i)} - delta_{i1}]_alpha for i = 1..k
    m_k: float
    memberships: dict
    refine_ratio: float             # top seminorm: full / half sampling

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "alpha": self.alpha_label,
            "window": list(self.window),
            "samples": self.samples,
            "sup_dev": list(self.sup_dev),
            "holder_dev": list(self.holder_dev),
            "M_k": self.m_k,
            "memberships": dict(self.memberships),
            "refine_ratio": self.refine_ratio,
        }


def norm_report(f: Diffeo1, alpha, k: int | None = None,
                density: int | None = None,
                balls: tuple = ()) -> NormReport:
    """Sup norms and Holder seminorms of the displacement of f.

    `balls` lists requested memberships as (kind, delta) with kind one of
    "C0", "Ck", "CkAlpha".
    """
    k = f.k if k is None else k
    if k > f.k:
        raise ValueError("requested order exceeds the model order")
    density = DEFAULT_TOL.eval_density if density is None else density
    step = _step_for(f, density)
    xs = sample_points(eval_window(f), step)
    jets = f.displacement_jets(xs, k)
    sup_dev = tuple(float(np.max(np.abs(jets[:, i]))) for i in range(k + 1))
    h = xs[1] - xs[0]
    holder_dev = tuple(holder_seminorm_samples(jets[:, i], h, alpha)
                       for i in range(1, k + 1))
    m_k = max(sup_dev[1:]) if k >= 1 else 0.0
    top_half = holder_seminorm_samples(jets[::2, k], 2 * h, alpha)
    top = holder_dev[-1] if holder_dev else 0.0
    ratio = top / top_half if top_half > 0 else 1.0
    memberships = {}
    for kind, delta in balls:
        if kind == "C0":
            value = sup_dev[0]
        elif kind == "Ck":
            value = sup_dev[k]
        elif kind == "CkAlpha":
            value = holder_dev[k - 1]
        else:
            raise ValueError(f"unknown ball kind {kind!r}")
        memberships[f"{kind}:{delta:g}"] = bool(value <= delta)
    label = getattr(alpha, "label", None) or type(alpha).__name__
    return NormReport(k, label, (float(xs[0]), float(xs[-1])), len(xs),
                      sup_dev, holder_dev, m_k, memberships, ratio)


# -- metrics -----------------------------------------------------------------

def _difference_jets(f: Diffeo1, g: Diffeo1, xs: np.ndarray,
                     order: int) -> np.ndarray:
    return f.jet_at(xs, order) - g.jet_at(xs, order)


def metric(f: Diffeo1, g: Diffeo1, kind: str, alpha=None,
           k: int | None = None, density: int | None = None,
           tol: Tolerances | None = None) -> float:
    """Distance between two maps: "C0" (which compares the inverses too),
    "Ck", or "CkAlpha"."""
    tol = tol or DEFAULT_TOL
    density = DEFAULT_TOL.eval_density if density is None else density
    step = min(_step_for(f, density), _step_for(g, density))
    xs = sample_points(pair_window(f, g), step)
    if kind == "C0":
        d_direct = float(np.max(np.abs(f(xs) - g(xs))))
        fi, gi = _inverse(f, tol), _inverse(g, tol)
        ys = sample_points(pair_window(fi, gi), step)
        d_inv = float(np.max(np.abs(fi(ys) - gi(ys))))
        return max(d_direct, d_inv)
    k = min(f.k, g.k) if k is None else k
    diff = _difference_jets(f, g, xs, k)
    d_k = float(np.max(np.abs(diff)))
    if kind == "Ck":
        return d_k
    if kind == "CkAlpha":
        if alpha is None:
            raise ValueError("CkAlpha metric needs a modulus")
        h = xs[1] - xs[0]
        sem = max(holder_seminorm_samples(diff[:, i], h, alpha)
                  for i in range(1, k + 1))
        return max(d_k, sem)
    raise ValueError(f"unknown metric kind {kind!r}")


# -- inequality checks -------------------------------------------------------

def _joint_support_window(f: Diffeo1, g: Diffeo1) -> tuple[float, float]:
    pieces = [support_interval(f), support_interval(g)]
    pieces = [p for p in pieces if p is not None]
    if not pieces:
        return (0.0, 1.0)
    return (min(p[0] for p in pieces), max(p[1] for p in pieces))


@dataclass(frozen=True)
class SlackReport:
    """Measured values of a norm inequality; every slack must be >= 0."""
    name: str
    constants: dict
    values: dict
    slacks: dict

    @property
    def ok(self) -> bool:
        return all(v >= 0.0 for v in self.slacks.values())

    def to_dict(self) -> dict:
        return {"name": self.name, "constants": dict(self.constants),
                "values": dict(self.values), "slacks": dict(self.slacks),
                "ok": self.ok}


def verify_domination(f: Diffeo1, g: Diffeo1, i: int, alpha,
                      density: int | None = None,
                      tol: Tolerances | None = None) -> SlackReport:
    """Check that the order-i difference norms of two maps that agree far
    away are dominated by the order-(i+1) sup, with the explicit constants
    ell*alpha(1), ell, ell/alpha(ell) for ell = |J| + 2.

    For i = 0 the maps must agree at the ends of the joint support window.
    """
    tol = tol or DEFAULT_TOL
    if i + 1 > min(f.k, g.k):
        raise ValueError("need jets of order i+1")
    density = DEFAULT_TOL.eval_density if density is None else density
    window = _joint_support_window(f, g)
    ell = (window[1] - window[0]) + 2.0
    if i == 0:
        edge = np.array(window)
        gap = float(np.max(np.abs(f(edge) - g(edge))))
        if gap > 1e-9:
            raise PreconditionError(
                f"order-0 domination needs equality on the window ends; "
                f"measured gap {gap:.3e}")
    step = min(_step_for(f, density), _step_for(g, density))
    xs = sample_points(pair_window(f, g), step)
    diff = _difference_jets(f, g, xs, i + 1)
    sup_i = float(np.max(np.abs(diff[:, i])))
    sup_ip1 = float(np.max(np.abs(diff[:, i + 1])))
    h = xs[1] - xs[0]
    sem_i = holder_seminorm_samples(diff[:, i], h, alpha)
    a1 = float(alpha(1.0))
    al = float(alpha(ell))
    slack = DEFAULT_TOL.estimator_slack
    return SlackReport(
        name=f"domination[i={i}]",
        constants={"ell": ell, "alpha(1)": a1, "alpha(ell)": al},
        values={"sup_i": sup_i, "sup_ip1": sup_ip1, "sem_i": sem_i},
        slacks={
            "sup_vs_sem": ell * a1 * sem_i * (1.0 + slack) - sup_i,
            "sup_vs_next": ell * sup_ip1 * (1.0 + slack) - sup_i,
            "sem_vs_next": (ell / al) * sup_ip1 * (1.0 + slack) - sem_i,
        })


def verify_derivation(f: Diffeo1, g: Diffeo1, alpha,
                      factors: list[Diffeo1] | None = None,
                      density: int | None = None) -> SlackReport:
    """Check the product, multi-product, and precomposition seminorm
    inequalities on the displacements of the given maps."""
    density = DEFAULT_TOL.eval_density if density is None else density
    step = min(_step_for(f, density), _step_for(g, density))
    xs = sample_points(pair_window(f, g), step)
    h = xs[1] - xs[0]
    phi = f.displacement_jets(xs, 0)[:, 0]
    psi = g.displacement_jets(xs, 0)[:, 0]

    def sem(v):
        return holder_seminorm_samples(v, h, alpha)

    def sup(v):
        return float(np.max(np.abs(v)))

    slack = DEFAULT_TOL.estimator_slack
    lhs1 = sem(phi * psi)
    rhs1 = sem(phi) * sup(psi) + sup(phi) * sem(psi)

    if factors is None:
        flist = [phi, psi, phi + psi]
    else:
        flist = [q.displacement_jets(xs, 0)[:, 0] for q in factors]
    prod = np.ones_like(xs)
    for v in flist:
        prod = prod * v
    m = len(flist)
    lhs2 = sem(prod)
    rhs2 = max(sup(v) for v in flist) ** (m - 1) * sum(sem(v) for v in flist)

    comp = f.displacement_jets(g(xs), 0)[:, 0]
    g1 = float(np.max(np.abs(g.deriv(xs, 1))))
    lhs3 = sem(comp)
    rhs3 = sem(phi) * max(g1, 1.0)

    return SlackReport(
        name="derivation",
        constants={"m": m, "max(|g|_1,1)": max(g1, 1.0)},
        values={"product_lhs": lhs1, "product_rhs": rhs1,
                "multi_lhs": lhs2, "multi_rhs": rhs2,
                "precompose_lhs": lhs3, "precompose_rhs": rhs3},
        slacks={"product": rhs1 * (1.0 + slack) - lhs1,
                "multi": rhs2 * (1.0 + slack) - lhs2,
                "precompose": rhs3 * (1.0 + slack) - lhs3})


def verify_composition_bound(f: Diffeo1, g: Diffeo1, alpha,
                             composed: Diffeo1 | None = None,
                             eps: float | None = None,
                             density: int | None = None,
                             tol: Tolerances | None = None) -> dict:
    """Measure the smallest C with |fg|_{k,a} <= |f|_{k,a} + |g|_{k,a}
    + C |f|_{k,a} |g|_{k,a} on this pair; both maps must lie in the
    seminorm ball of radius eps."""
    from .diffeo import compose as _compose
    tol = tol or DEFAULT_TOL
    if f.k != g.k:
        raise ValueError("operands carry different jet orders")
    k = f.k
    nf = holder_norm(f, alpha, k, density)
    ng = holder_norm(g, alpha, k, density)
    if eps is not None and max(nf, ng) > eps:
        raise PreconditionError(
            f"pair leaves the seminorm ball: {max(nf, ng):.3e} > {eps:.3e}")
    fg = composed if composed is not None else _compose(f, g, tol)
    nfg = holder_norm(fg, alpha, k, density)
    excess = nfg - nf - ng
    c_req = max(0.0, excess / (nf * ng)) if nf * ng > 0 else 0.0
    return {"norm_f": nf, "norm_g": ng, "norm_fg": nfg,
            "fitted_C": c_req}


def verify_subadditivity(terms: list[Diffeo1], alpha,
                         density: int | None = None) -> SlackReport:
    """[sum phi_i]_alpha <= sum [phi_i]_alpha on displacement samples."""
    if not terms:
        raise ValueError("need at least one term")
    density = DEFAULT_TOL.eval_density if density is None else density
    lo = min(eval_window(t)[0] for t in terms)
    hi = max(eval_window(t)[1] for t in terms)
    step = min(_step_for(t, density) for t in terms)
    xs = sample_points((lo, hi), step)
    h = xs[1] - xs[0]
    vals = [t.displacement_jets(xs, 0)[:, 0] for t in terms]
    lhs = holder_seminorm_samples(np.sum(vals, axis=0), h, alpha)
    rhs = sum(holder_seminorm_samples(v, h, alpha) for v in vals)
    return SlackReport(
        name="subadditivity",
        constants={"terms": len(terms)},
        values={"lhs": lhs, "rhs": rhs},
        slacks={"subadditivity": rhs - lhs})


def verify_lip_met(f: Diffeo1, alpha, density: int | None = None) -> SlackReport:
    """Norm ladder on a compactly supported displacement: with
    K = |J| + alpha(|J|) + |J|/alpha(|J|), the order-k sup is at most
    K times the order-k seminorm, and both order-(k-1) quantities are
    at most K times the order-k sup."""
    density = DEFAULT_TOL.eval_density if density is None else density
    supp = support_interval(f)
    if supp is None:
        jlen = 1.0
    else:
        jlen = max(supp[1] - supp[0], 1e-6)
    a_j = float(alpha(jlen))
    big_k = jlen + a_j + jlen / a_j
    step = _step_for(f, density)
    xs = sample_points(eval_window(f), step)
    h = xs[1] - xs[0]
    k = f.k
    jets = f.displacement_jets(xs, k)
    sup_k = float(np.max(np.abs(jets[:, k])))
    sem_k = holder_seminorm_samples(jets[:, k], h, alpha)
    sup_km1 = float(np.max(np.abs(jets[:, k - 1])))
    sem_km1 = holder_seminorm_samples(jets[:, k - 1], h, alpha)
    slack = DEFAULT_TOL.estimator_slack
    return SlackReport(
        name="norm_ladder",
        constants={"K": big_k, "|J|": jlen},
        values={"sup_k": sup_k, "sem_k": sem_k,
                "sup_km1": sup_km1, "sem_km1": sem_km1},
        slacks={
            "sup_le_K_sem": big_k * sem_k * (1.0 + slack) - sup_k,
            "lower_sup_le_K_sup": big_k * sup_k * (1.0 + slack) - sup_km1,
            "lower_sem_le_K_sup": big_k * sup_k * (1.0 + slack) - sem_km1,
        })
