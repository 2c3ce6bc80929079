"""Central configuration record: every tolerance and size knob in one place.

All defaults are overridable; operations receive a Tolerances instance
(or fall back to DEFAULT_TOL) so that no numeric threshold is buried in
module code.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict, replace


@dataclass(frozen=True)
class Tolerances:
    # structural invariants of stored objects
    node_zero: float = 1e-10          # "jet vanishes" slack at tail nodes
    concavity_rel: float = 1e-12      # chord test, relative
    periodic_match: float = 1e-10     # u(x+1) = u(x) node agreement

    # root finding / inversion
    invert_abscissa: float = 1e-12    # Newton/bisection stop, in x
    jet_base_match: float = 1e-9      # compose_jets base-point agreement

    # resolution policy
    interp_residual: float = 1e-9     # midpoint residual that forces doubling
    max_nodes: int = 2 ** 16
    eval_density: int = 8             # norm grids: nodes per grid cell

    # Holder seminorm estimator
    holder_scales: int = 24           # dyadic separation scales
    estimator_slack: float = 0.01     # 1% slack when asserting inequalities

    # tameness classification
    tameness_margin: float = 1e-3

    # rolling-up / spreading / conjugacy
    surgery_boundary: float = 1e-9    # |h(dJ) - dJ| before restriction surgery
    window_fix: float = 1e-9          # displacement jets on the fixed window
    tol_b: float = 1e-7               # translation test, deviation from mean
    overlap: float = 1e-7             # piecewise-assembly overlap agreement
    intertwine: float = 1e-7          # shift-intertwining residual
    word_cap: int = 100000            # max word length before refusal

    # flow integration
    ode_tol: float = 1e-12

    # fixed-point experiment
    fix_tol: float = 1e-6
    fix_max_iter: int = 200
    cert_tol: float = 1e-5

    def to_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **kw) -> "Tolerances":
        return replace(self, **kw)


DEFAULT_TOL = Tolerances()


def smallness_threshold(k: int) -> float:
    """Default smallness ball radius: 1e-3 for k <= 2, shrunk 10x per extra order."""
    if k <= 2:
        return 1e-3
    return 1e-3 * 10.0 ** (2 - k)


@dataclass(frozen=True)
class RunConfig:
    """Echoed into every CLI output file so runs are reproducible."""

    k: int = 2
    alpha_spec: str = "holder:0.5"
    A: int = 1
    grid_n: int = 0                   # 0 means "let each operation choose"
    seed: int = 0
    out_dir: str = "."
    tol: Tolerances = field(default_factory=Tolerances)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tol"] = self.tol.to_dict()
        return d
