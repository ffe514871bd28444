"""Command-line front end: data export, curve generation, validation.

Every output embeds the full parameter set, seed, and tool version in
its metadata, so a run can be reproduced byte-for-byte from the file
alone.  The default output directory comes from the BLINECOX_OUT
environment variable (falling back to the current directory).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import blcp, blp, metrics, montecarlo
from .curves import CurveTable
from .geometry import BlcpModel, BlpModel, point_on_line, sample_blcp
from .metrics import MetaQuery, RadioParams
from .montecarlo import McConfig

try:
    from importlib.metadata import version

    _VERSION = version("blinecox")
except Exception:  # pragma: no cover - not installed
    _VERSION = "unknown"

__all__ = ["main", "RunConfig", "build_parser", "run_checks", "CHECKS"]


@dataclass(frozen=True)
class RunConfig:
    """Parameters common to all subcommands, echoed into output metadata."""

    nb: int = 10
    radius: float = 50.0
    intensity: float = 0.1
    alpha: float = 2.0
    xi0: float = 2.9858e-8
    gamma: float = 0.1
    p: float = 1.0
    r0: float = 0.0
    seed: int = 0
    trials: int = 10000
    fmt: str = "csv"
    out: str | None = None

    def blp_model(self) -> BlpModel:
        return BlpModel(n_b=self.nb, radius=self.radius)

    def blcp_model(self) -> BlcpModel:
        return BlcpModel(self.blp_model(), intensity=self.intensity)

    def radio(self) -> RadioParams:
        return RadioParams(alpha=self.alpha, xi0=self.xi0, gamma=self.gamma, p=self.p)

    def mc(self, **overrides) -> McConfig:
        kwargs = dict(trials=self.trials, master_seed=self.seed, workers=4)
        kwargs.update(overrides)
        return McConfig(**kwargs)


def _metadata(cfg: RunConfig, command: str, **extra) -> dict:
    md = {"command": command, "tool_version": _VERSION}
    md.update(asdict(cfg))
    md.update(extra)
    return md


def _emit(table: CurveTable, cfg: RunConfig, default_name: str) -> str:
    out = cfg.out
    if out is None:
        out_dir = os.environ.get("BLINECOX_OUT", ".")
        out = os.path.join(out_dir, default_name + "." + cfg.fmt)
    text = table.to_csv() if cfg.fmt == "csv" else table.to_json()
    if out == "-":
        sys.stdout.write(text)
        return "-"
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise SystemExit(f"cannot write {out}: {exc}")
    return out


def cmd_sample(cfg: RunConfig) -> CurveTable:
    """One realization: line rows carry (theta, r); point rows carry the
    plane coordinates of each Cox point."""
    radius = 2.0 * cfg.radius
    real = sample_blcp(cfg.blcp_model(), radius, cfg.seed)
    series, xs, ys = [], [], []
    for line in real.lines:
        series.append("line")
        xs.append(line.theta)
        ys.append(line.r)
    for line, offsets in zip(real.lines, real.points_on_line):
        for off in offsets:
            pt = point_on_line(line, float(off))
            series.append("point")
            xs.append(pt.x)
            ys.append(pt.y)
    return CurveTable(
        series=series,
        x=np.asarray(xs),
        y=np.asarray(ys),
        metadata=_metadata(cfg, "sample", materialize_radius=radius),
    )


def cmd_density(cfg: RunConfig, kind: str, r_max: float, n_grid: int,
                mc_overlay: bool) -> CurveTable:
    model = cfg.blp_model()
    r = np.linspace(0.0, r_max, n_grid)
    if kind == "line_length":
        y = np.asarray([blp.line_length_density(model, float(v)) for v in r])
    else:
        y = np.asarray([blp.intersection_density(model, float(v)) for v in r])
    series = ["analytic"] * n_grid
    x, yy = list(r), list(y)
    ci_lo = [math.nan] * n_grid
    ci_hi = [math.nan] * n_grid
    if mc_overlay:
        mc_kind = "line_length" if kind == "line_length" else "intersections"
        hist = montecarlo.mc_radial_histogram(
            mc_kind, model, r_max / max(n_grid - 1, 1), r_max, cfg.mc()
        )
        series += ["mc"] * len(hist)
        x += list(hist.x)
        yy += list(hist.y)
        ci_lo += list(hist.ci_low)
        ci_hi += list(hist.ci_high)
    return CurveTable(
        series=series, x=np.asarray(x), y=np.asarray(yy),
        ci_low=np.asarray(ci_lo), ci_high=np.asarray(ci_hi),
        metadata=_metadata(cfg, "density", kind=kind, r_max=r_max, mc=mc_overlay),
    )


def cmd_nearest(cfg: RunConfig, target: str, t_max: float, n_grid: int) -> CurveTable:
    t = np.linspace(0.0, t_max, n_grid)
    if target == "line":
        model = cfg.blp_model()
        y = np.asarray([blp.cdf_nearest_line(model, cfg.r0, float(v)) for v in t])
    elif target == "blcp_point":
        cmodel = cfg.blcp_model()
        y = np.asarray(blcp.cdf_nearest_blcp_point(cmodel, cfg.r0, t))
    else:
        model = cfg.blp_model()
        y = np.asarray(blp.cdf_nearest_intersection(model, cfg.r0, t))
    return CurveTable(
        series=[target] * n_grid, x=t, y=y,
        metadata=_metadata(cfg, "nearest", target=target, t_max=t_max),
    )


def cmd_coverage(cfg: RunConfig, sweep: str, lo: float, hi: float, n_grid: int) -> CurveTable:
    grid = np.linspace(lo, hi, n_grid)
    radio = cfg.radio()
    ys = []
    for v in grid:
        if sweep == "r0":
            y = metrics.success_probability(cfg.blcp_model(), radio, float(v))
        elif sweep == "nb":
            model = BlcpModel(BlpModel(n_b=max(int(round(v)), 1), radius=cfg.radius),
                              intensity=cfg.intensity)
            y = metrics.success_probability(model, radio, cfg.r0)
        else:
            model = BlcpModel(cfg.blp_model(), intensity=float(v))
            y = metrics.success_probability(model, radio, cfg.r0)
        ys.append(y)
    return CurveTable(
        series=[sweep] * n_grid, x=grid, y=np.asarray(ys),
        metadata=_metadata(cfg, "coverage", sweep=sweep),
    )


def cmd_meta(cfg: RunConfig, gammas: list[float], n_beta: int) -> CurveTable:
    betas = np.linspace(0.01, 0.99, n_beta)
    model = cfg.blcp_model()
    series, xs, ys = [], [], []
    for g in gammas:
        radio = replace(cfg.radio(), gamma=g)
        vals = metrics.meta_distribution(
            model, radio, cfg.r0, [MetaQuery(g, float(b)) for b in betas]
        )
        series += [f"gamma={g:g}"] * n_beta
        xs += list(betas)
        ys += list(np.asarray(vals))
    return CurveTable(
        series=series, x=np.asarray(xs), y=np.asarray(ys),
        metadata=_metadata(cfg, "meta", gammas=gammas),
    )


def cmd_delay(cfg: RunConfig, n_p: int) -> CurveTable:
    """Mean local delay over a transmit-probability grid; divergent points
    are emitted as inf."""
    ps = np.linspace(1.0 / n_p, 1.0, n_p)
    model = cfg.blcp_model()
    vals = []
    for p in ps:
        radio = replace(cfg.radio(), p=float(p))
        vals.append(metrics.mean_local_delay(model, radio, cfg.r0))
    return CurveTable(
        series=["delay"] * n_p, x=ps, y=np.asarray(vals),
        metadata=_metadata(cfg, "delay"),
    )


def cmd_std(cfg: RunConfig, n_p: int) -> CurveTable:
    ps = np.linspace(1.0 / n_p, 1.0, n_p)
    model = cfg.blcp_model()
    vals = []
    for p in ps:
        radio = replace(cfg.radio(), p=float(p))
        vals.append(metrics.successful_transmission_density(model, radio, cfg.r0))
    return CurveTable(
        series=["std"] * n_p, x=ps, y=np.asarray(vals),
        metadata=_metadata(cfg, "std"),
    )


# ---------------------------------------------------------------------------
# validation suite


def _check_band_area(cfg: RunConfig) -> tuple[float, float, float]:
    observed = blp.domain_band_area(0.0, 10.0, 100.0)
    return observed, 2.0 * math.pi * 10.0, 1e-9


def _check_plp_density(cfg: RunConfig) -> tuple[float, float, float]:
    return blp.plp_intersection_density(0.1), math.pi * 0.01, 1e-12


def _check_void_blp(cfg: RunConfig) -> tuple[float, float, float]:
    model = BlpModel(n_b=10, radius=100.0)
    est = montecarlo.mc_void_blp(model, 0.0, 10.0, cfg.mc())
    return est.mean, blp.void_prob_blp(model, 0.0, 10.0), 4.0 * max(est.std_error, 1e-12)


def _check_void_blcp(cfg: RunConfig) -> tuple[float, float, float]:
    model = BlcpModel(BlpModel(n_b=10, radius=50.0), intensity=0.1)
    est = montecarlo.mc_void_blcp(model, 25.0, 3.0, cfg.mc())
    return est.mean, blcp.void_prob_blcp(model, 25.0, 3.0), 4.0 * max(est.std_error, 1e-12)


def _check_pgfl_unit(cfg: RunConfig) -> tuple[float, float, float]:
    model = BlcpModel(BlpModel(n_b=10, radius=50.0), intensity=0.1)
    f = blcp.RadialFunctional(f=lambda r: np.ones_like(r), tail_exponent=2.0)
    return blcp.conditional_pgfl(model, 0.0, 5.0, f), 1.0, 1e-9


def _check_pgfl_mc(cfg: RunConfig) -> tuple[float, float, float]:
    model = BlcpModel(BlpModel(n_b=10, radius=50.0), intensity=0.1)
    f = blcp.RadialFunctional(
        f=lambda r: 1.0 / (1.0 + 25.0 / np.clip(r, 1e-12, None) ** 2),
        tail_exponent=2.0,
    )
    est = montecarlo.mc_conditional_pgfl(model, 0.0, 5.0, f, cfg.mc())
    return est.mean, blcp.conditional_pgfl(model, 0.0, 5.0, f), 4.0 * max(est.std_error, 1e-12)


def _check_success_closed_form(cfg: RunConfig) -> tuple[float, float, float]:
    model = BlcpModel(BlpModel(n_b=1, radius=50.0), intensity=0.1)
    radio = RadioParams(alpha=2.0, xi0=10.0, gamma=0.1, p=1.0)
    d1 = 5.0
    general = metrics.conditional_success_moment(model, radio, 0.0, d1, 1.0)
    closed = math.exp(-radio.gamma * d1**2 / radio.xi0) * metrics.pgfl_closed_form_alpha2_nb1(
        model, radio, 0.0, d1
    )
    return general, closed, 1e-6


def _check_delay_mc(cfg: RunConfig) -> tuple[float, float, float]:
    model = BlcpModel(BlpModel(n_b=2, radius=20.0), intensity=0.05)
    radio = RadioParams(alpha=2.0, xi0=10.0, gamma=0.01, p=0.5)
    analytic = metrics.mean_local_delay(model, radio, 0.0)
    est, _ = montecarlo.mc_local_delay(
        model, radio, 0.0, 200, cfg.mc(materialize_radius=400.0, block_size=512)
    )
    return est.mean, analytic, 0.05 * analytic


def _check_meta_integral(cfg: RunConfig) -> tuple[float, float, float]:
    model = BlcpModel(BlpModel(n_b=10, radius=50.0), intensity=0.1)
    radio = RadioParams(alpha=2.0, xi0=2.9858e8, gamma=0.1, p=1.0)
    betas = np.linspace(0.005, 0.995, 100)
    vals = metrics.meta_distribution(
        model, radio, 0.0, [MetaQuery(0.1, float(b)) for b in betas]
    )
    integral = float(np.trapezoid(np.concatenate(([1.0], vals, [0.0])),
                                  np.concatenate(([0.0], betas, [1.0]))))
    m1 = float(np.real(metrics.moment(model, radio, 0.0, 1.0)))
    return integral, m1, 1e-3


def _check_determinism(cfg: RunConfig) -> tuple[float, float, float]:
    model = BlpModel(n_b=10, radius=50.0)
    a = montecarlo.mc_void_blp(model, 0.0, 5.0, cfg.mc(workers=1))
    b = montecarlo.mc_void_blp(model, 0.0, 5.0, cfg.mc(workers=4))
    return a.mean, b.mean, 0.0


CHECKS = {
    "band_area_plp_constant": _check_band_area,
    "plp_intersection_density": _check_plp_density,
    "void_blp_vs_mc": _check_void_blp,
    "void_blcp_vs_mc": _check_void_blcp,
    "pgfl_unit_functional": _check_pgfl_unit,
    "conditional_pgfl_vs_mc": _check_pgfl_mc,
    "success_closed_form_alpha2": _check_success_closed_form,
    "local_delay_vs_mc": _check_delay_mc,
    "meta_integral_identity": _check_meta_integral,
    "worker_determinism": _check_determinism,
}


def run_checks(cfg: RunConfig, names=None, inject_fault: str | None = None) -> dict:
    """Run named validation checks; returns the JSON-serializable report.

    ``inject_fault`` perturbs the expected value of one named check so a
    deliberate failure path can be exercised end to end.
    """
    names = list(CHECKS) if names is None else list(names)
    results = []
    for name in names:
        if name not in CHECKS:
            raise SystemExit(f"unknown check: {name}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            observed, expected, tol = CHECKS[name](cfg)
        if inject_fault == name:
            expected = expected + max(1.0, abs(expected)) * 0.5
        passed = abs(observed - expected) <= tol
        results.append(
            {
                "check": name,
                "observed": observed,
                "expected": expected,
                "tolerance": tol,
                "passed": bool(passed),
            }
        )
    return {
        "schema_version": 1,
        "tool_version": _VERSION,
        "config": asdict(cfg),
        "checks": results,
        "passed": all(r["passed"] for r in results),
    }


def cmd_validate(cfg: RunConfig, names=None, inject_fault: str | None = None) -> int:
    report = run_checks(cfg, names, inject_fault)
    out = cfg.out
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    else:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
    for r in report["checks"]:
        status = "PASS" if r["passed"] else "FAIL"
        print(
            f"{status} {r['check']}: observed={r['observed']:.6g} "
            f"expected={r['expected']:.6g} tol={r['tolerance']:.3g}",
            file=sys.stderr,
        )
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blinecox",
        description="Binomial line process toolkit: samplers, statistics, "
        "wireless metrics, and validation.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nb", type=int, default=10)
    common.add_argument("--radius", type=float, default=50.0)
    common.add_argument("--lambda", dest="intensity", type=float, default=0.1)
    common.add_argument("--alpha", type=float, default=2.0)
    common.add_argument("--xi0", type=float, default=2.9858e-8)
    common.add_argument("--gamma", type=float, default=0.1)
    common.add_argument("--p", type=float, default=1.0)
    common.add_argument("--r0", type=float, default=0.0)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=10000)
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path, or - for stdout")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sample", parents=[common])

    d = sub.add_parser("density", parents=[common])
    d.add_argument("--kind", choices=("line_length", "intersection"), default="line_length")
    d.add_argument("--r-max", type=float, default=100.0)
    d.add_argument("--n-grid", type=int, default=51)
    d.add_argument("--mc", action="store_true", help="add a Monte Carlo overlay")

    n = sub.add_parser("nearest", parents=[common])
    n.add_argument("--target", choices=("line", "blcp_point", "intersection"), default="line")
    n.add_argument("--t-max", type=float, default=50.0)
    n.add_argument("--n-grid", type=int, default=101)

    c = sub.add_parser("coverage", parents=[common])
    c.add_argument("--sweep", choices=("r0", "nb", "lambda"), default="r0")
    c.add_argument("--lo", type=float, default=0.0)
    c.add_argument("--hi", type=float, default=100.0)
    c.add_argument("--n-grid", type=int, default=26)

    m = sub.add_parser("meta", parents=[common])
    m.add_argument("--gammas", type=float, nargs="+", default=[0.01, 0.1, 1.0])
    m.add_argument("--n-beta", type=int, default=33)

    dl = sub.add_parser("delay", parents=[common])
    dl.add_argument("--n-p", type=int, default=20)

    st = sub.add_parser("std", parents=[common])
    st.add_argument("--n-p", type=int, default=20)

    v = sub.add_parser("validate", parents=[common])
    v.add_argument("--checks", nargs="+", default=None)
    v.add_argument("--inject-fault", default=None)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        nb=args.nb, radius=args.radius, intensity=args.intensity,
        alpha=args.alpha, xi0=args.xi0, gamma=args.gamma, p=args.p,
        r0=args.r0, seed=args.seed, trials=args.trials,
        fmt=args.fmt, out=args.out,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config_from_args(args)
    if args.command == "validate":
        return cmd_validate(cfg, args.checks, args.inject_fault)
    if args.command == "sample":
        table = cmd_sample(cfg)
    elif args.command == "density":
        table = cmd_density(cfg, args.kind, args.r_max, args.n_grid, args.mc)
    elif args.command == "nearest":
        table = cmd_nearest(cfg, args.target, args.t_max, args.n_grid)
    elif args.command == "coverage":
        table = cmd_coverage(cfg, args.sweep, args.lo, args.hi, args.n_grid)
    elif args.command == "meta":
        table = cmd_meta(cfg, args.gammas, args.n_beta)
    elif args.command == "delay":
        table = cmd_delay(cfg, args.n_p)
    else:
        table = cmd_std(cfg, args.n_p)
    path = _emit(table, cfg, args.command)
    if path != "-":
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
