"""Command-line entry point wiring all modules together.

Analysis subcommands write JSON or CSV reports, `verify` runs the cross-
module invariant battery, and `emit-plots` dumps the standard data
tables.  Every output carries the effective run configuration, files are
written atomically, and exit codes are: 0 all pass, 1 a verification
failed, 2 usage, 3 a numerical precondition refused the input.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import tempfile

import numpy as np

from .config import DEFAULT_TOL, RunConfig, Tolerances
from .errors import ConstructionError, PreconditionError
from . import diffeo, fixpoint, flow, modulus, norms, reduction
from .jets import compose_derivs, invert_derivs

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_REFUSED = 3

_INT_TOL_FIELDS = {"max_nodes", "eval_density", "holder_scales",
                   "word_cap", "fix_max_iter"}


def _cap_workers() -> int | None:
    """Best-effort thread cap from DIFFEOLAB_MAX_WORKERS."""
    raw = os.environ.get("DIFFEOLAB_MAX_WORKERS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(
            f"DIFFEOLAB_MAX_WORKERS must be an integer, got {raw!r}")
    if n < 1:
        raise ValueError("DIFFEOLAB_MAX_WORKERS must be >= 1")
    try:
        import threadpoolctl
        threadpoolctl.threadpool_limits(n)
    except ImportError:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(n))
    return n


def parse_alpha(spec: str):
    """Parse a modulus spec: holder:S, omegaz:SIGMA,TAU, or file:PATH."""
    kind, _, rest = spec.partition(":")
    if kind == "holder":
        return modulus.holder(float(rest))
    if kind == "omegaz":
        parts = rest.split(",")
        if len(parts) != 2:
            raise ValueError(f"omegaz wants two parameters, got {spec!r}")
        return modulus.log_refined_holder(float(parts[0]), float(parts[1]))
    if kind == "file":
        with open(rest, encoding="utf-8") as fh:
            return modulus.modulus_from_dict(json.load(fh))
    raise ValueError(f"unknown modulus spec {spec!r}")


def _write_text(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str, payload: dict) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: str, cfg: RunConfig, columns: list[str],
               rows: list[list]) -> None:
    buf = io.StringIO()
    for key, val in sorted(cfg.to_dict().items()):
        buf.write(f"# {key}={val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    _write_text(path, buf.getvalue())


def _make_run_config(args) -> RunConfig:
    """Merge CLI flags over config-file values over defaults."""
    file_cfg: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return file_cfg.get(key, default)

    tol_kw = dict(file_cfg.get("tol", {}))
    for f in dataclasses.fields(Tolerances):
        v = getattr(args, f"tol_{f.name}", None)
        if v is not None:
            tol_kw[f.name] = v
    for name in list(tol_kw):
        if name in _INT_TOL_FIELDS:
            tol_kw[name] = int(tol_kw[name])
    tol = DEFAULT_TOL.with_overrides(**tol_kw) if tol_kw else DEFAULT_TOL

    return RunConfig(
        k=int(pick(getattr(args, "k", None), "k", 2)),
        alpha_spec=str(pick(getattr(args, "alpha", None), "alpha",
                            "holder:0.5")),
        A=int(pick(getattr(args, "A", None), "A", 1)),
        grid_n=int(pick(getattr(args, "grid_n", None), "grid_n", 0)),
        seed=int(pick(getattr(args, "seed", None), "seed", 0)),
        out_dir=str(pick(getattr(args, "out", None), "out", ".")),
        tol=tol,
    )


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=None, help="jet order")
    p.add_argument("--alpha", default=None,
                   help="modulus: holder:0.5 | omegaz:0.5,0.3 | file:PATH")
    p.add_argument("--A", type=int, default=None,
                   help="source half-width parameter")
    p.add_argument("--grid-n", dest="grid_n", type=int, default=None,
                   help="grid override, 0 = adaptive")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--config", default=None, help="JSON config file")
    for f in dataclasses.fields(Tolerances):
        p.add_argument(f"--tol-{f.name.replace('_', '-')}",
                       dest=f"tol_{f.name}", type=float, default=None,
                       help=argparse.SUPPRESS)


def _out_path(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.out_dir, name)


def _echo_config(cfg: RunConfig) -> None:
    d = cfg.to_dict()
    keys = ("k", "alpha_spec", "A", "grid_n", "seed", "out_dir")
    print("config: " + " ".join(f"{k}={d[k]}" for k in keys))


# -- modulus ------------------------------------------------------------------

def _cmd_modulus(args) -> int:
    cfg = _make_run_config(args)
    _echo_config(cfg)
    spec = (f"holder:{args.holder}" if args.holder is not None
            else cfg.alpha_spec)
    alpha = parse_alpha(spec)
    verdict = modulus.classify_tameness(alpha, tol=cfg.tol)
    laws = modulus.check_modulus_laws(alpha, 2.0, np.geomspace(1e-4, 1e2, 61),
                                      cfg.tol)
    conc = modulus.concavity_slack(alpha, modulus.default_abscissae())
    ok = laws.passed and conc >= -cfg.tol.concavity_rel
    payload = {
        "run_config": cfg.to_dict(),
        "alpha": spec,
        "tameness": verdict.to_dict(),
        "laws": laws.to_dict(),
        "concavity_slack": conc,
        "ok": ok,
    }
    path = _out_path(cfg, "modulus_verdict.json")
    _write_json(path, payload)
    print(f"modulus analyze: sup-tame={verdict.sup_tame.label()} "
          f"sub-tame={verdict.sub_tame.label()} laws={laws.passed} "
          f"-> {path}")
    return EXIT_OK if ok else EXIT_VERIFY


# -- diffeo -------------------------------------------------------------------

def _cmd_diffeo(args) -> int:
    cfg = _make_run_config(args)
    _echo_config(cfg)
    f = diffeo.from_preset(args.preset, {"eps": args.eps, "k": cfg.k},
                           cfg.tol)
    fi = diffeo.inverse(f, cfg.tol)
    xs = diffeo.refined_grid(f, 4)
    round_c0 = float(np.max(np.abs(fi(f(xs)) - xs)))
    d = diffeo.from_dict(diffeo.to_dict(f), cfg.tol)
    ser = float(np.max(np.abs(d(xs) - f(xs))))
    supp = diffeo.support_interval(f)
    ok = round_c0 <= 1e-9 and ser == 0.0
    payload = {
        "run_config": cfg.to_dict(),
        "preset": args.preset,
        "eps": args.eps,
        "inverse_roundtrip_c0": round_c0,
        "serialization_roundtrip": ser,
        "support": None if supp is None else list(supp),
        "nodes": f.n,
        "ok": ok,
    }
    path = _out_path(cfg, "diffeo_check.json")
    _write_json(path, payload)
    print(f"diffeo check: roundtrip={round_c0:.3e} ok={ok} -> {path}")
    return EXIT_OK if ok else EXIT_VERIFY


# -- norms --------------------------------------------------------------------

def _cmd_norms(args) -> int:
    cfg = _make_run_config(args)
    _echo_config(cfg)
    alpha = parse_alpha(cfg.alpha_spec)
    f = diffeo.from_preset(args.preset, {"eps": args.eps, "k": cfg.k},
                           cfg.tol)
    report = norms.norm_report(f, alpha, k=cfg.k,
                               balls=(("C0", 1e-2), ("Ck", 1e-2),
                                      ("CkAlpha", 1e-2)))
    total = norms.holder_norm(f, alpha, cfg.k)
    payload = {
        "run_config": cfg.to_dict(),
        "preset": args.preset,
        "eps": args.eps,
        "norm": total,
        "report": report.to_dict(),
    }
    path = _out_path(cfg, "norm_report.json")
    _write_json(path, payload)
    print(f"norms measure: norm={total:.6e} -> {path}")
    return EXIT_OK


# -- flow ---------------------------------------------------------------------

def _cmd_flow(args) -> int:
    cfg = _make_run_config(args)
    _echo_config(cfg)
    field = flow.make_rho(max(cfg.A, 1))
    resid = flow.verify_chart_conjugation(field, args.b, args.samples,
                                          k=cfg.k, tol=cfg.tol)
    radius = min(1.0, field.plateau / 2.0)
    u = diffeo.from_preset("smooth_bump_displacement",
                           {"eps": 1e-3, "radius": radius, "k": cfg.k},
                           cfg.tol)
    fix_resid = flow.verify_chart_fixes_support(field, u, args.samples,
                                                tol=cfg.tol)
    ok = resid <= cfg.tol.intertwine and fix_resid <= cfg.tol.intertwine
    payload = {
        "run_config": cfg.to_dict(),
        "b": args.b,
        "samples": args.samples,
        "intertwining_residual": resid,
        "support_fix_residual": fix_resid,
        "ok": ok,
    }
    path = _out_path(cfg, "flow_chart.json")
    _write_json(path, payload)
    print(f"flow chart: intertwining={resid:.3e} "
          f"support-fix={fix_resid:.3e} ok={ok} -> {path}")
    return EXIT_OK if ok else EXIT_VERIFY


# -- mather -------------------------------------------------------------------

def _small_periodic(rng, k: int, eps: float) -> diffeo.Diffeo1:
    """Random two-harmonic periodic displacement of amplitude eps."""
    n = 257
    xs = np.linspace(0.0, 1.0, n)
    jets = np.zeros((n, k + 1))
    a1, a2 = rng.uniform(0.4, 1.0, 2)
    p1, p2 = rng.uniform(0.0, 2.0 * np.pi, 2)
    w = 2.0 * np.pi
    for j in range(k + 1):
        jets[:, j] = eps * (
            a1 * w ** j * np.sin(w * xs + p1 + j * np.pi / 2.0)
            + 0.25 * a2 * (2.0 * w) ** j
            * np.sin(2.0 * w * xs + p2 + j * np.pi / 2.0))
    return diffeo.Diffeo1("periodic", 0.0, 1.0, k, jets)


def _cmd_mather(args) -> int:
    cfg = _make_run_config(args)
    _echo_config(cfg)
    alpha = parse_alpha(cfg.alpha_spec)
    k, tol = cfg.k, cfg.tol

    if args.op == "psi":
        A_values = [int(s) for s in args.sweep.split(",")]
        rows = reduction.reduction_sweep(A_values, k, alpha, tol=tol)
        cols = ["A", "norm_in", "norm_out", "plain_ratio",
                "rescale_factor", "ratio", "rolled_slope"]
        path = _out_path(cfg, "psi_sweep.csv")
        _write_csv(path, cfg, cols, [[r[c] for c in cols] for r in rows])
        print(f"mather psi: {len(rows)} rows -> {path}")
        return EXIT_OK

    mcfg = reduction.make_config(k, alpha, max(cfg.A, 1))

    if args.op == "gamma":
        g = diffeo.from_preset("smooth_bump_displacement",
                               {"eps": args.eps, "k": k}, tol)
        check = reduction.roll_norm_check(g, mcfg, tol)
        equi = reduction.roll_equivariance_residual(g, 0.37, tol)
        ok = check.ok and equi <= 1e-9
        payload = {
            "run_config": cfg.to_dict(),
            "eps": args.eps,
            "word_norm_check": check.to_dict(),
            "equivariance_residual": equi,
            "ok": ok,
        }
        path = _out_path(cfg, "gamma_report.json")
        _write_json(path, payload)
        print(f"mather gamma: equivariance={equi:.3e} ok={ok} -> {path}")
        return EXIT_OK if ok else EXIT_VERIFY

    if args.op == "omega":
        rng = np.random.default_rng(cfg.seed)
        h = _small_periodic(rng, k, args.eps)
        out = reduction.spread(h, mcfg, tol)
        back = reduction.roll_up(out, tol)
        target = diffeo.post_translate(h, -float(h(np.array(0.0))))
        xs = np.linspace(0.0, 1.0, 2049)
        resid = float(np.max(np.abs(back(xs) - target(xs))))
        supp = diffeo.support_interval(out)
        ok = resid <= 1e-6
        payload = {
            "run_config": cfg.to_dict(),
            "eps": args.eps,
            "roundtrip_c0": resid,
            "spread_support": None if supp is None else list(supp),
            "ok": ok,
        }
        path = _out_path(cfg, "omega_report.json")
        _write_json(path, payload)
        print(f"mather omega: roundtrip={resid:.3e} ok={ok} -> {path}")
        return EXIT_OK if ok else EXIT_VERIFY

    if args.op == "lambda":
        g = reduction.sweep_profile(mcfg.A, k, args.eps)
        res = reduction.reduce_norm(g, mcfg, tol)
        cert = reduction.conjugator(g, res.map, mcfg, tol)
        ok = cert.residual <= tol.cert_tol
        payload = {
            "run_config": cfg.to_dict(),
            "eps": args.eps,
            "residual": cert.residual,
            "word_length": cert.word_length,
            "translation": cert.b,
            "witness_support":
                list(diffeo.support_interval(cert.lam) or ()),
            "reduction": res.to_dict(),
            "ok": ok,
        }
        path = _out_path(cfg, "lambda_report.json")
        _write_json(path, payload)
        print(f"mather lambda: residual={cert.residual:.3e} ok={ok} "
              f"-> {path}")
        return EXIT_OK if ok else EXIT_VERIFY

    raise ValueError(f"unknown mather operation {args.op!r}")


# -- perfect ------------------------------------------------------------------

def _cmd_perfect(args) -> int:
    cfg = _make_run_config(args)
    _echo_config(cfg)
    tol = cfg.tol

    if args.op == "verify":
        chain = fixpoint.load_chain(args.chain)
        report = fixpoint.verify_certificate(chain, tol)
        text = json.dumps(report, indent=2, sort_keys=True)
        if args.report:
            _write_text(args.report, text + "\n")
            print(f"perfect verify: ok={report['ok']} -> {args.report}")
        else:
            print(text)
            print(f"perfect verify: ok={report['ok']}")
        return EXIT_OK if report["ok"] else EXIT_VERIFY

    with open(args.infile, encoding="utf-8") as fh:
        f = diffeo.from_dict(json.load(fh), tol)
    alpha = parse_alpha(cfg.alpha_spec)
    mcfg = reduction.make_config(cfg.k, alpha, cfg.A)
    res = fixpoint.fixed_point_search(f, mcfg, tol=tol)
    if res.converged:
        fixpoint.write_chain(args.outfile, res.chain)
        print(f"perfect fixpoint: converged at iteration {res.iterations}, "
              f"residual {res.residual:.3e} -> {args.outfile}")
        return EXIT_OK
    payload = {
        "format": "fixpoint-trace",
        "version": 1,
        "outcome": "no-convergence",
        "run_config": cfg.to_dict(),
        "iterations": res.iterations,
        "residual": res.residual,
        "trace": res.trace,
    }
    _write_json(args.outfile, payload)
    print(f"perfect fixpoint: no convergence after {res.iterations} "
          f"iterations (residual {res.residual:.3e}) -> {args.outfile}")
    return EXIT_OK


# -- verify battery -----------------------------------------------------------

def _poly_derivs(c: np.ndarray, x: float, k: int) -> np.ndarray:
    """Derivative orders 0..k of the coefficient polynomial at x."""
    vals = [np.polynomial.polynomial.polyval(x, c)]
    d = np.asarray(c, dtype=float)
    for _ in range(k):
        d = np.polynomial.polynomial.polyder(d)
        vals.append(np.polynomial.polynomial.polyval(x, d))
    return np.array(vals)


def _suite_jets(rng, tol) -> dict:
    worst = 0.0
    for _ in range(60):
        k = int(rng.integers(2, 7))
        cf = rng.uniform(-1.0, 1.0, k + 1)
        cg = rng.uniform(-1.0, 1.0, k + 1)
        x0 = float(rng.uniform(-0.5, 0.5))
        gx = float(np.polynomial.polynomial.polyval(x0, cg))
        comp = compose_derivs(_poly_derivs(cf, gx, k),
                              _poly_derivs(cg, x0, k))
        cc = np.zeros(1)
        for a in reversed(cf):
            cc = np.polynomial.polynomial.polymul(cc, cg)
            cc[0] += a
        oracle = _poly_derivs(cc, x0, k)
        scale = max(1.0, float(np.max(np.abs(oracle))))
        worst = max(worst, float(np.max(np.abs(comp - oracle))) / scale)
    for _ in range(60):
        k = int(rng.integers(2, 7))
        d = rng.uniform(-0.5, 0.5, k + 1)
        d[1] = float(rng.uniform(0.8, 1.5))
        di = invert_derivs(d, 0.0)
        back = compose_derivs(di, d)
        expected = np.zeros(k + 1)
        expected[1] = 1.0
        worst = max(worst, float(np.max(np.abs(back - expected))))
    return {"ok": worst <= 1e-9, "worst_rel_error": worst}


def _suite_modulus(rng, tol) -> dict:
    sandwich_min = np.inf
    for _ in range(8):
        xs = np.linspace(0.0, 4.0, 161)
        fs = np.cumsum(np.abs(rng.normal(0.0, 0.1, 161)))
        ts, mus = modulus.oscillation_modulus(xs, fs)
        if len(ts) < 3:
            continue
        beta0, _ = modulus.least_concave_majorant(ts, mus)
        lo, hi = modulus.lcm_sandwich_slack(ts, mus, beta0)
        sandwich_min = min(sandwich_min, lo, hi)
    law_pass = True
    conc_min = np.inf
    grid = np.geomspace(1e-4, 1e2, 61)
    for a in (modulus.holder(0.25), modulus.holder(0.5),
              modulus.log_refined_holder(0.5, 0.3)):
        for C in (0.3, 2.0, 7.0):
            law_pass &= modulus.check_modulus_laws(a, C, grid, tol).passed
        conc_min = min(conc_min,
                       modulus.concavity_slack(a,
                                               modulus.default_abscissae()))
    ok = (sandwich_min >= -1e-12 and law_pass
          and conc_min >= -tol.concavity_rel)
    return {"ok": bool(ok), "sandwich_slack_min": float(sandwich_min),
            "laws_pass": bool(law_pass), "concavity_min": float(conc_min)}


def _suite_diffeo(rng, tol) -> dict:
    worst_round = 0.0
    worst_comp = 0.0
    worst_ser = 0.0
    for _ in range(4):
        eps = float(rng.uniform(1e-4, 1e-3))
        f = diffeo.from_preset("smooth_bump_displacement",
                               {"eps": eps, "k": 2}, tol)
        g = diffeo.from_preset("smooth_bump_displacement",
                               {"eps": eps / 2.0, "radius": 1.3, "k": 2},
                               tol)
        fi = diffeo.inverse(f, tol)
        xs = np.linspace(-1.4, 1.4, 1001)
        worst_round = max(worst_round,
                          float(np.max(np.abs(fi(f(xs)) - xs))))
        fg = diffeo.compose(f, g, tol)
        worst_comp = max(worst_comp,
                         float(np.max(np.abs(fg(xs) - f(g(xs))))))
        d = diffeo.from_dict(diffeo.to_dict(f), tol)
        worst_ser = max(worst_ser, float(np.max(np.abs(d(xs) - f(xs)))))
    ok = worst_round <= 1e-9 and worst_comp <= 1e-7 and worst_ser == 0.0
    return {"ok": bool(ok), "inverse_roundtrip": worst_round,
            "composition_pointwise": worst_comp,
            "serialization": worst_ser}


def _suite_norms(rng, tol) -> dict:
    alpha = modulus.holder(0.5)
    f = diffeo.from_preset("smooth_bump_displacement",
                           {"eps": 1e-3, "k": 2}, tol)
    g = diffeo.from_preset("smooth_bump_displacement",
                           {"eps": 5e-4, "radius": 1.2, "k": 2}, tol)
    reports = [norms.verify_domination(f, g, i, alpha, tol=tol)
               for i in range(2)]
    reports.append(norms.verify_derivation(f, g, alpha))
    reports.append(norms.verify_subadditivity([f, g], alpha))
    reports.append(norms.verify_lip_met(f, alpha))
    slack_min = {r.name: min(r.slacks.values()) for r in reports}
    ok = all(v >= 0.0 for v in slack_min.values())
    return {"ok": bool(ok), "slack_min": slack_min}


def _suite_flow(rng, tol) -> dict:
    field = flow.make_rho(1)
    resid = flow.verify_chart_conjugation(field, 0.6, 33, k=2, tol=tol)
    u = diffeo.from_preset("smooth_bump_displacement",
                           {"eps": 1e-3, "k": 2}, tol)
    fix_resid = flow.verify_chart_fixes_support(field, u, 33, tol=tol)
    ok = resid <= tol.intertwine and fix_resid <= tol.intertwine
    return {"ok": bool(ok), "intertwining_residual": float(resid),
            "support_fix_residual": float(fix_resid)}


def _suite_mather(rng, tol) -> dict:
    k = 2
    alpha = modulus.holder(0.5)
    mcfg = reduction.make_config(k, alpha, 1)
    xs = np.linspace(0.0, 1.0, 1025)
    ident = reduction.roll_up(diffeo.identity(k, -0.5, 0.5), tol)
    gamma_id = float(np.max(np.abs(ident(xs) - xs)))
    g = diffeo.from_preset("smooth_bump_displacement",
                           {"eps": 1e-5, "k": k}, tol)
    equi = reduction.roll_equivariance_residual(g, 0.21, tol)
    word = reduction.roll_norm_check(g, mcfg, tol)
    h = _small_periodic(rng, k, 2e-5)
    out = reduction.spread(h, mcfg, tol)
    back = reduction.roll_up(out, tol)
    target = diffeo.post_translate(h, -float(h(np.array(0.0))))
    roundtrip = float(np.max(np.abs(back(xs) - target(xs))))
    ok = (gamma_id == 0.0 and equi <= 1e-9 and word.ok
          and roundtrip <= 1e-6)
    return {"ok": bool(ok), "roll_identity": gamma_id,
            "equivariance": float(equi),
            "word_norm_ok": bool(word.ok),
            "spread_roundtrip_c0": float(roundtrip)}


_SUITES = {
    "jets": _suite_jets,
    "modulus": _suite_modulus,
    "diffeo": _suite_diffeo,
    "norms": _suite_norms,
    "flow": _suite_flow,
    "mather": _suite_mather,
}


def _cmd_verify(args) -> int:
    cfg = _make_run_config(args)
    _echo_config(cfg)
    names = list(_SUITES) if args.suite == "all" else args.suite.split(",")
    for name in names:
        if name not in _SUITES:
            raise ValueError(f"unknown suite {name!r}")
    results = {}
    for idx, name in enumerate(names):
        rng = np.random.default_rng([cfg.seed, idx])
        results[name] = _SUITES[name](rng, cfg.tol)
        print(f"  {name}: {'pass' if results[name]['ok'] else 'FAIL'}")
    ok = all(r["ok"] for r in results.values())
    payload = {"run_config": cfg.to_dict(), "ok": ok, "suites": results}
    path = _out_path(cfg, "verify_report.json")
    _write_json(path, payload)
    print(f"verify: {'all pass' if ok else 'FAILURES'} -> {path}")
    return EXIT_OK if ok else EXIT_VERIFY


# -- emit-plots ----------------------------------------------------------------

def _cmd_emit_plots(args) -> int:
    cfg = _make_run_config(args)
    _echo_config(cfg)
    tol = cfg.tol
    tables = args.tables.split(",")
    known = {"sweep", "tameness", "lcm", "traces"}
    unknown = set(tables) - known
    if unknown:
        raise ValueError(f"unknown tables {sorted(unknown)}")
    written = []

    if "sweep" in tables:
        A_values = [int(s) for s in args.sweep.split(",")]
        rows = reduction.reduction_sweep(A_values, cfg.k,
                                         parse_alpha(cfg.alpha_spec),
                                         tol=tol)
        cols = ["A", "norm_in", "norm_out", "plain_ratio",
                "rescale_factor", "ratio", "rolled_slope"]
        path = _out_path(cfg, "norm_reduction_sweep.csv")
        _write_csv(path, cfg, cols, [[r[c] for c in cols] for r in rows])
        written.append(path)

    if "tameness" in tables:
        ts = np.geomspace(1e-4, 0.9, 33)
        xg = modulus.default_abscissae()
        rows = []
        for s in (0.25, 0.5, 0.75):
            a = modulus.holder(s)
            for t in ts:
                sup = float(np.max(
                    modulus.tameness_functional(a, float(t), xg, "sup")))
                sub = float(np.max(
                    modulus.tameness_functional(a, float(t), xg, "sub")))
                rows.append([s, float(t), sup, sub])
        path = _out_path(cfg, "tameness_functionals.csv")
        _write_csv(path, cfg, ["s", "t", "F_sup", "G_sub"], rows)
        written.append(path)

    if "lcm" in tables:
        rng = np.random.default_rng(cfg.seed)
        xs = np.linspace(0.0, 4.0, 161)
        fs = np.cumsum(np.abs(rng.normal(0.0, 0.1, 161)))
        ts, mus = modulus.oscillation_modulus(xs, fs)
        beta0, _ = modulus.least_concave_majorant(ts, mus)
        vals = beta0(ts)
        rows = [[float(t), float(m), float(v), float(2.0 * m)]
                for t, m, v in zip(ts, mus, vals)]
        path = _out_path(cfg, "lcm_sandwich.csv")
        _write_csv(path, cfg, ["t", "mu", "beta0", "two_mu"], rows)
        written.append(path)

    if "traces" in tables:
        alpha = parse_alpha(cfg.alpha_spec)
        mcfg = reduction.make_config(cfg.k, alpha, cfg.A)
        f = fixpoint.calibrated_bump(args.fix_norm, alpha, k=cfg.k, tol=tol)
        res = fixpoint.fixed_point_search(f, mcfg, tol=tol)
        rows = [[t["iteration"], t["residual"], t["norm_composed"],
                 t["norm_conjugated"], t["norm_reduced"],
                 t["rolled_slope"]] for t in res.trace]
        path = _out_path(cfg, "residual_traces.csv")
        _write_csv(path, cfg,
                   ["iteration", "residual", "norm_composed",
                    "norm_conjugated", "norm_reduced", "rolled_slope"],
                   rows)
        written.append(path)

    for p in written:
        print(f"emit-plots: wrote {p}")
    return EXIT_OK


# -- argument wiring ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="diffeolab",
        description="Numerical workbench for norm reduction on the "
                    "diffeomorphism group of the line.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modulus", help="analyze a concave modulus")
    ps = p.add_subparsers(dest="op", required=True)
    pa = ps.add_parser("analyze", help="tameness verdict and law checks")
    pa.add_argument("--holder", type=float, default=None,
                    help="shortcut for --alpha holder:S")
    _add_common(pa)
    pa.set_defaults(fn=_cmd_modulus)

    p = sub.add_parser("diffeo", help="interpolation model checks")
    ps = p.add_subparsers(dest="op", required=True)
    pc = ps.add_parser("check", help="inverse and serialization residuals")
    pc.add_argument("--preset", default="smooth_bump_displacement")
    pc.add_argument("--eps", type=float, default=1e-3)
    _add_common(pc)
    pc.set_defaults(fn=_cmd_diffeo)

    p = sub.add_parser("norms", help="norm and seminorm measurement")
    ps = p.add_subparsers(dest="op", required=True)
    pm = ps.add_parser("measure", help="full norm report for a preset")
    pm.add_argument("--preset", default="smooth_bump_displacement")
    pm.add_argument("--eps", type=float, default=1e-3)
    _add_common(pm)
    pm.set_defaults(fn=_cmd_norms)

    p = sub.add_parser("flow", help="plateau-field flow checks")
    ps = p.add_subparsers(dest="op", required=True)
    pf = ps.add_parser("chart",
                       help="trajectory-chart conjugation residuals")
    pf.add_argument("--b", type=float, default=0.6)
    pf.add_argument("--samples", type=int, default=33)
    _add_common(pf)
    pf.set_defaults(fn=_cmd_flow)

    p = sub.add_parser("mather", help="rolling up, spreading, reduction")
    ps = p.add_subparsers(dest="op", required=True)
    for op, eps_default, blurb in (
            ("gamma", 1e-5, "rolling-up word checks"),
            ("omega", 3e-5, "spreading round trip"),
            ("lambda", 4e-6, "conjugacy witness for one reduction")):
        po = ps.add_parser(op, help=blurb)
        po.add_argument("--eps", type=float, default=eps_default)
        _add_common(po)
        po.set_defaults(fn=_cmd_mather)
    pp = ps.add_parser("psi", help="norm-reduction ratio sweep")
    pp.add_argument("--sweep", default="1,2,4,8",
                    help="comma-separated width parameters")
    _add_common(pp)
    pp.set_defaults(fn=_cmd_mather)

    p = sub.add_parser("perfect", help="fixed-point experiment")
    ps = p.add_subparsers(dest="op", required=True)
    pf = ps.add_parser("fixpoint", help="run the iteration, emit a chain")
    pf.add_argument("--in", dest="infile", required=True,
                    help="JSON file describing the input map")
    pf.add_argument("--out-chain", dest="outfile", default="chain.json")
    _add_common(pf)
    pf.set_defaults(fn=_cmd_perfect)
    pv = ps.add_parser("verify", help="replay a certificate chain")
    pv.add_argument("chain")
    pv.add_argument("--report", default=None)
    _add_common(pv)
    pv.set_defaults(fn=_cmd_perfect)

    p = sub.add_parser("verify", help="cross-module invariant battery")
    p.add_argument("--suite", default="all",
                   help="all or comma-separated: " + ",".join(_SUITES))
    _add_common(p)
    p.set_defaults(fn=_cmd_verify, op=None)

    p = sub.add_parser("emit-plots", help="write the standard data tables")
    p.add_argument("--tables", default="sweep,tameness,lcm,traces")
    p.add_argument("--sweep", default="1,2,4,8")
    p.add_argument("--fix-norm", type=float, default=1e-3)
    _add_common(p)
    p.set_defaults(fn=_cmd_emit_plots, op=None)

    return ap


def main(argv=None) -> int:
    try:
        _cap_workers()
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        code = e.code
        return code if isinstance(code, int) else EXIT_USAGE
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except (PreconditionError, ConstructionError) as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_REFUSED
    except (ValueError, OSError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
