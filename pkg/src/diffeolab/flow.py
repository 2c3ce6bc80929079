"""Plateau vector field, its time-t maps, and the trajectory chart.

The field rho is 1 on [-2A, 2A], 0 outside [-2A-1, 2A+1], even, and
smooth: rho(x) = S(2A+1-|x|) / (S(2A+1-|x|) + S(|x|-2A)) with
S(t) = exp(-1/t) for t > 0 and 0 otherwise.

Time-t maps integrate dx/ds = rho(x) together with the variational
equations for derivative jets: writing Y = (y, y', ..., y^(k)) for the
jets of the flow in the initial condition, dY/ds equals the jet of
rho o Phi, which the chain-rule table computes from the jets of rho at
y.  A single high-order adaptive Runge-Kutta solve (tight tolerance)
integrates all nodes at once.

The chart phi(x) is the trajectory of 0 evaluated at time x.  Its
derivative jets need no extra integration: phi' = rho(phi), and higher
orders follow triangularly.  phi increases from -2A-1 to 2A+1 but only
logarithmically fast outside the plateau, so the tabulated window ends
at W = 8(2A+1) with a constant clamp beyond; the clamp value still sits
visibly inside the asymptote and inverse lookups are restricted to the
attained range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import _taylor
from .config import DEFAULT_TOL, Tolerances
from .diffeo import Diffeo1, _hermite_coeffs, _horner
from .errors import ConstructionError
from .jets import compose_derivs

_ODE_METHOD = "DOP853"

# tabulation density for flow objects; the Hermite residual scales like
# (1/density)^(2k+2), so 256 keeps C^0 errors near 1e-12 for k = 2
_NODES_PER_UNIT = 256


def _auto_nodes(width: float) -> int:
    n = int(round(width * _NODES_PER_UNIT)) + 1
    if n % 2 == 0:
        n += 1
    return max(n, 129)


@dataclass(frozen=True)
class PlateauField:
    """Unit-plateau bump field: 1 on [-2A, 2A], 0 outside [-2A-1, 2A+1]."""
    A: int

    @property
    def plateau(self) -> float:
        return 2.0 * self.A

    @property
    def edge(self) -> float:
        return 2.0 * self.A + 1.0

    def jets(self, x, order: int) -> np.ndarray:
        """Derivatives 0..order of rho, exactly even in x."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        ax = np.abs(x)
        out = np.zeros(x.shape + (order + 1,))
        flat = ax <= self.plateau
        out[flat, 0] = 1.0
        ramp = (~flat) & (ax < self.edge)
        if ramp.any():
            t = self.edge - ax[ramp]
            coeffs = _taylor.compose_affine(
                _taylor.smoothstep_series(t, order), -1.0)
            jets = _taylor.coeffs_to_derivs(coeffs)
            # mirror to negative arguments: odd orders change sign
            sign = np.where(x[ramp][:, None] < 0.0,
                            (-1.0) ** np.arange(order + 1)[None, :], 1.0)
            out[ramp] = jets * sign
        return out

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        val = self.jets(x, 0)[..., 0]
        return val[0] if scalar else val


def make_rho(A: int) -> PlateauField:
    if A < 1 or int(A) != A:
        raise ValueError("A must be a positive integer")
    return PlateauField(int(A))


def _flow_rhs(field: PlateauField, k: int):
    def rhs(_s, state):
        Y = state.reshape(-1, k + 1)
        rj = field.jets(Y[:, 0], k)
        return compose_derivs(rj, Y).reshape(-1)
    return rhs


def time_t_map(field: PlateauField, t: float, k: int,
               n: int | None = None, tol: Tolerances | None = None) -> Diffeo1:
    """The time-t map of the field as a compactly supported diffeomorphism."""
    tol = tol or DEFAULT_TOL
    lo, hi = -field.edge, field.edge
    if n is None:
        n = _auto_nodes(hi - lo)
    xs = np.linspace(lo, hi, n)
    if t == 0.0:
        return Diffeo1("compact", lo, hi, k, np.zeros((n, k + 1)), tol=tol)
    y0 = np.zeros((n, k + 1))
    y0[:, 0] = xs
    y0[:, 1] = 1.0
    sol = solve_ivp(_flow_rhs(field, k), (0.0, t), y0.reshape(-1),
                    method=_ODE_METHOD, atol=tol.ode_tol, rtol=tol.ode_tol,
                    t_eval=[t])
    if not sol.success:
        raise ConstructionError(f"flow integration failed: {sol.message}")
    jets = sol.y[:, -1].reshape(n, k + 1)
    jets[:, 0] -= xs
    jets[:, 1] -= 1.0
    return Diffeo1("compact", lo, hi, k, jets, tol=tol)


class Chart:
    """Monotone map phi with range inside (-2A-1, 2A+1), tabulated as jets
    on [-W, W] and clamped to its end values beyond."""

    def __init__(self, field: PlateauField, k: int, jets: np.ndarray,
                 w: float):
        self.field = field
        self.k = k
        self.w = w
        n = jets.shape[0]
        self.n = n
        self.h = 2.0 * w / (n - 1)
        jets = np.array(jets, dtype=float)
        jets.setflags(write=False)
        self.jets = jets
        self._dc = None

    @property
    def asymptote(self) -> float:
        return self.field.edge

    @property
    def attained(self) -> float:
        """Largest chart value in the table (strictly below the asymptote)."""
        return float(self.jets[-1, 0])

    def _ensure(self):
        if self._dc is None:
            c = _hermite_coeffs(self.jets, self.h)
            dc = [c]
            for _ in range(self.k):
                prev = dc[-1]
                m = prev.shape[1] - 1
                dc.append(prev[:, 1:] * np.arange(1, m + 1))
            self._dc = dc
        return self._dc

    def jet_at(self, x, order: int | None = None) -> np.ndarray:
        if order is None:
            order = self.k
        if order > self.k:
            raise ValueError("requested order exceeds the chart order")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xf = np.clip(x, -self.w, self.w)
        pos = (xf + self.w) / self.h
        idx = np.clip(pos.astype(int), 0, self.n - 2)
        t = pos - idx
        dc = self._ensure()
        out = np.empty(x.shape + (order + 1,))
        for j in range(order + 1):
            out[..., j] = _horner(dc[j][idx], t) / self.h ** j
        beyond = np.abs(x) > self.w
        if beyond.any():
            clamp = np.where(x[beyond] > 0, self.jets[-1, 0], self.jets[0, 0])
            out[beyond] = 0.0
            out[beyond, 0] = clamp
        return out

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        val = self.jet_at(np.atleast_1d(x), 0)[..., 0]
        return float(val[0]) if scalar else val

    def inverse_value(self, y, xtol: float = 1e-12) -> np.ndarray:
        """Solve phi(x) = y inside the tabulated window."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(y <= self.jets[0, 0]) or np.any(y >= self.jets[-1, 0]):
            raise ValueError("chart inverse requested outside attained range")
        lo = np.full(y.shape, -self.w)
        hi = np.full(y.shape, self.w)
        x = np.clip(y, lo, hi)
        for _ in range(200):
            jet = self.jet_at(x, 1)
            fx = jet[..., 0] - y
            neg = fx < 0.0
            lo = np.where(neg, x, lo)
            hi = np.where(neg, hi, x)
            step = fx / np.maximum(jet[..., 1], 1e-300)
            xn = x - step
            bad = (xn <= lo) | (xn >= hi) | ~np.isfinite(xn)
            xn = np.where(bad, 0.5 * (lo + hi), xn)
            moved = float(np.max(np.abs(xn - x)))
            x = xn
            if moved <= xtol:
                break
        return x


def trajectory_chart(field: PlateauField, k: int, n: int | None = None,
                     tol: Tolerances | None = None) -> Chart:
    """Integrate the trajectory of 0 for time x, for x in [-W, W]."""
    tol = tol or DEFAULT_TOL
    w = 8.0 * field.edge
    if n is None:
        n = _auto_nodes(2.0 * w)
    if n % 2 == 0:
        n += 1
    xs = np.linspace(-w, w, n)
    half = (n - 1) // 2
    vals = np.empty(n)
    vals[half] = 0.0

    def rhs(_s, y):
        return field.jets(y, 0)[:, 0]

    for sign, sl in ((1.0, slice(half + 1, n)), (-1.0, slice(half - 1, None, -1))):
        times = sign * xs[sl] if sign < 0 else xs[sl]
        sol = solve_ivp(lambda s, y: sign * rhs(s, y), (0.0, float(times[-1])),
                        [0.0], method=_ODE_METHOD,
                        atol=tol.ode_tol, rtol=tol.ode_tol,
                        t_eval=times)
        if not sol.success:
            raise ConstructionError(f"chart integration failed: {sol.message}")
        vals[sl] = sol.y[0]

    jets = np.zeros((n, k + 1))
    jets[:, 0] = vals
    rj = field.jets(vals, k)
    for j in range(1, k + 1):
        jets[:, j] = compose_derivs(rj[:, :j], jets[:, :j])[:, j - 1]
    return Chart(field, k, jets, w)


def verify_chart_conjugation(field: PlateauField, b: float, samples: int,
                             k: int = 2, chart: Chart | None = None,
                             tau: Diffeo1 | None = None,
                             tol: Tolerances | None = None) -> float:
    """Residual of the intertwining identity: applying the chart inverse,
    translating by b, and mapping back should equal the time-b map."""
    tol = tol or DEFAULT_TOL
    chart = chart or trajectory_chart(field, k, tol=tol)
    tau = tau or time_t_map(field, b, k, tol=tol)
    reach = chart(chart.w - abs(b) - 0.5)
    r = min(chart.attained - 1e-9, reach)
    xs = np.linspace(-r, r, samples)
    lhs = chart(chart.inverse_value(xs) + b)
    rhs = tau(xs)
    return float(np.max(np.abs(lhs - rhs)))


def verify_chart_fixes_support(field: PlateauField, u: Diffeo1, samples: int,
                               chart: Chart | None = None,
                               tol: Tolerances | None = None) -> float:
    """Residual of the identity that maps supported inside the plateau
    commute with the chart."""
    tol = tol or DEFAULT_TOL
    chart = chart or trajectory_chart(field, u.k, tol=tol)
    supp = None
    from .diffeo import support_interval
    supp = support_interval(u)
    if supp is not None and (supp[0] < -field.plateau
                             or supp[1] > field.plateau):
        raise ValueError("map must be supported inside the plateau")
    r = chart.attained - 1e-9
    xs = np.linspace(-r, r, samples)
    lhs = chart(u(chart.inverse_value(xs)))
    rhs = u(xs)
    return float(np.max(np.abs(lhs - rhs)))
