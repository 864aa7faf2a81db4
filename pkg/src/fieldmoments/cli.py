"""Experiment harness: field draws, step/site sweeps, sampling, validation.

Every delimited artifact starts with a ``# config: <canonical-json>`` line
so it is reproducible bit-for-bit from its own header.  Exit codes: 0 on
success, 1 on a failed validation or self-check, 2 on a configuration
error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import anonymity, plotting, protocol, validate
from .estimator import (
    CSV_HEADER,
    EstimatorReport,
    MomentPlan,
    dt_grid,
    optimal_dt,
    uncertainty,
)
from .fields import UniformFieldDistribution, draw_fields

# Monte Carlo at security-coupled N beyond this many sites is compute
# prohibitive; sweeps fall back to closed forms there.
ANALYTIC_ONLY_L = 10**7

_WORKERS_ENV = "FIELDMOMENTS_WORKERS"


@dataclass
class ExperimentConfig:
    L: int = 1
    k: int = 1
    omega_min: float = 1.0
    omega_max: float = 5.0
    seed: int = 0
    dt_grid: int = 200
    N: int | str = "auto"
    mode: str = "analytic"

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError("L must be positive")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.dt_grid < 3:
            raise ValueError("dt-grid must be at least 3 points")
        if self.mode not in ("analytic", "montecarlo", "both"):
            raise ValueError("mode must be analytic, montecarlo or both")
        if self.N != "auto" and int(self.N) < 1:
            raise ValueError("N must be positive or 'auto'")

    def canonical_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, separators=(",", ":"))

    def resolve_n(self) -> int:
        if self.N == "auto":
            n = anonymity.max_secure_N(self.L, self.k)
            if n < 1:
                raise ValueError(
                    f"auto-N unsatisfiable: no repetition count is secure at "
                    f"L={self.L}, k={self.k}"
                )
            return n
        return int(self.N)

    def effective_mode(self) -> str:
        if self.mode != "analytic" and self.L >= ANALYTIC_ONLY_L:
            print(
                f"warning: L={self.L} forces analytic mode "
                f"(Monte Carlo cutoff is L={ANALYTIC_ONLY_L})",
                file=sys.stderr,
            )
            return "analytic"
        return self.mode


def run_sweep_dt(config: ExperimentConfig) -> list[dict]:
    """One row per step-grid point: analytic report plus optional sampling."""
    n = config.resolve_n()
    mode = config.effective_mode()
    cfg = draw_fields(
        UniformFieldDistribution(config.omega_min, config.omega_max, config.seed),
        config.L,
    )
    rows = []
    for dt in dt_grid(config.omega_max, config.k, config.dt_grid):
        plan = MomentPlan(k=config.k, dt=float(dt))
        report = uncertainty(cfg, plan, n)
        row = {"report": report, "run": None}
        if mode in ("montecarlo", "both"):
            row["run"] = protocol.sample_protocol(cfg, plan, n, config.seed)
        rows.append(row)
    return rows


def run_sweep_l(config: ExperimentConfig, l_list: list[int]) -> list[dict]:
    """Per site count: draw fields, auto-N, minimize over the step grid."""
    if l_list != sorted(l_list):
        raise ValueError("L list must be ascending")
    workers = int(os.environ.get(_WORKERS_ENV, "1"))
    args = [(config, i, L) for i, L in enumerate(l_list)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_l_entry, args))
    else:
        rows = [_sweep_l_entry(a) for a in args]
    for prev, cur in zip(rows, rows[1:]):
        if cur["min_relative_uncertainty"] > prev["min_relative_uncertainty"]:
            print(
                f"warning: min relative uncertainty rose from L={prev['L']} to "
                f"L={cur['L']} (single-draw noise)",
                file=sys.stderr,
            )
    return rows


def _sweep_l_entry(arg: tuple[ExperimentConfig, int, int]) -> dict:
    config, index, L = arg
    sub = dataclasses.replace(config, L=L, seed=config.seed + index)
    n = sub.resolve_n()
    cfg = draw_fields(
        UniformFieldDistribution(sub.omega_min, sub.omega_max, sub.seed), L
    )
    best_dt, report = optimal_dt(
        cfg, sub.k, n, grid=sub.dt_grid, omega_max=sub.omega_max
    )
    return {
        "L": L,
        "k": sub.k,
        "N": n,
        "best_dt": best_dt,
        "min_relative_uncertainty": report.relative_uncertainty,
        "report": report,
    }


# ----------------------------------------------------------------------
# CSV emission
# ----------------------------------------------------------------------


def _write_lines(lines: list[str], output: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dt_sweep_lines(config: ExperimentConfig, rows: list[dict]) -> list[str]:
    has_mc = any(row["run"] is not None for row in rows)
    header = CSV_HEADER + ",log10_relative_uncertainty"
    if has_mc:
        header += ",mc_estimate,mc_variance"
    lines = [f"# config: {config.canonical_json()}", header]
    for row in rows:
        report: EstimatorReport = row["report"]
        cells = report.to_csv_row() + "," + repr(_log10(report.relative_uncertainty))
        if has_mc:
            run = row["run"]
            cells += f",{run.d_estimate!r},{run.d_variance_empirical!r}"
        lines.append(cells)
    return lines


def _l_sweep_lines(config: ExperimentConfig, rows: list[dict]) -> list[str]:
    lines = [
        f"# config: {config.canonical_json()}",
        "L,k,N,best_dt,min_relative_uncertainty,log10_min_relative_uncertainty",
    ]
    for row in rows:
        lines.append(
            f"{row['L']},{row['k']},{row['N']},{row['best_dt']!r},"
            f"{row['min_relative_uncertainty']!r},"
            f"{_log10(row['min_relative_uncertainty'])!r}"
        )
    return lines


def _log10(x: float) -> float:
    return math.log10(x) if x > 0 else math.nan


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fieldmoments",
        description="Moment estimation over a simulated sensing network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file supplying any subset of flags")
    common.add_argument("--l", type=int, help="number of sites")
    common.add_argument("--k", type=int, help="moment order")
    common.add_argument("--omega-min", type=float, help="field lower bound")
    common.add_argument("--omega-max", type=float, help="field upper bound")
    common.add_argument("--seed", type=int, help="reproducibility seed")
    common.add_argument("--dt-grid", type=int, help="log-spaced step-grid points")
    common.add_argument("--n", help="repetition count or 'auto'")
    common.add_argument(
        "--mode", choices=("analytic", "montecarlo", "both"), help="evaluation mode"
    )
    common.add_argument("--output", help="write CSV here instead of stdout")

    p = sub.add_parser("estimate", parents=[common], help="one analytic report row")
    p.add_argument("--dt", type=float, required=True, help="time step")

    p = sub.add_parser("sweep-dt", parents=[common], help="step sweep at fixed L")
    p.add_argument("--figure", help="also render the sweep to this image file")
    p.add_argument(
        "--self-check",
        action="store_true",
        help="fail if sampled means drift beyond 5 standard errors",
    )

    p = sub.add_parser("sweep-l", parents=[common], help="site-count sweep")
    p.add_argument(
        "--l-list", required=True, help="comma-separated ascending site counts"
    )
    p.add_argument("--figure", help="also render the trend to this image file")

    p = sub.add_parser("anonymity", parents=[common], help="per-site bound report")
    p.add_argument("--dt", type=float, required=True, help="time step")

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo run summary")
    p.add_argument("--dt", type=float, required=True, help="time step")
    p.add_argument(
        "--raw", action="store_true", help="include per-repeat values in the JSON"
    )

    p = sub.add_parser("validate-oracle", parents=[common], help="bundled self-checks")
    return parser


_CONFIG_FIELDS = ("L", "k", "omega_min", "omega_max", "seed", "dt_grid", "N", "mode")
_FLAG_TO_FIELD = {
    "l": "L",
    "k": "k",
    "omega_min": "omega_min",
    "omega_max": "omega_max",
    "seed": "seed",
    "dt_grid": "dt_grid",
    "n": "N",
    "mode": "mode",
}


def _merge_config(args: argparse.Namespace, require: tuple[str, ...]) -> ExperimentConfig:
    values: dict = {}
    if args.config:
        with open(args.config) as fh:
            file_values = json.load(fh)
        unknown = set(file_values) - set(_CONFIG_FIELDS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(file_values)
    for flag, field in _FLAG_TO_FIELD.items():
        flag_value = getattr(args, flag, None)
        if flag_value is not None:
            values[field] = flag_value
    for field in require:
        if field not in values:
            raise ValueError(f"missing required setting: {field}")
    if "N" in values and values["N"] != "auto":
        values["N"] = int(values["N"])
    return ExperimentConfig(**values)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "estimate":
        config = _merge_config(args, require=("L", "k"))
        n = config.resolve_n()
        cfg = draw_fields(
            UniformFieldDistribution(config.omega_min, config.omega_max, config.seed),
            config.L,
        )
        report = uncertainty(cfg, MomentPlan(k=config.k, dt=args.dt), n)
        _write_lines(
            [f"# config: {config.canonical_json()}", CSV_HEADER, report.to_csv_row()],
            args.output,
        )
        return 0

    if args.command == "sweep-dt":
        config = _merge_config(args, require=("L", "k"))
        rows = run_sweep_dt(config)
        _write_lines(_dt_sweep_lines(config, rows), args.output)
        if args.figure:
            plotting.plot_dt_sweep([row["report"] for row in rows], args.figure)
        if args.self_check:
            n = config.resolve_n()
            for row in rows:
                run = row["run"]
                if run is None:
                    continue
                report = row["report"]
                band = 5.0 * math.sqrt(report.variance / n)
                if abs(run.d_estimate - report.expectation) > band:
                    print(
                        f"self-check failed at dt={report.dt}: "
                        f"|{run.d_estimate} - {report.expectation}| > {band}",
                        file=sys.stderr,
                    )
                    return 1
        return 0

    if args.command == "sweep-l":
        config = _merge_config(args, require=("k",))
        l_list = [int(v) for v in args.l_list.split(",") if v]
        rows = run_sweep_l(config, l_list)
        _write_lines(_l_sweep_lines(config, rows), args.output)
        if args.figure:
            plotting.plot_l_sweep(
                [row["L"] for row in rows],
                [row["min_relative_uncertainty"] for row in rows],
                config.k,
                args.figure,
            )
        return 0

    if args.command == "anonymity":
        config = _merge_config(args, require=("L", "k"))
        report = anonymity.qfi_report(config.L, config.k, args.dt, config.resolve_n())
        verdict = "secure" if report.secure else "NOT secure"
        _write_lines(
            [
                report.to_json(),
                f"verdict: {verdict} (phase bound {report.phase_bound:.6f}, "
                f"threshold {anonymity.SECURITY_THRESHOLD:.6f})",
            ],
            args.output,
        )
        return 0

    if args.command == "sample":
        config = _merge_config(args, require=("L", "k"))
        n = config.resolve_n()
        if config.L >= ANALYTIC_ONLY_L:
            raise ValueError(f"sampling is capped at L < {ANALYTIC_ONLY_L}")
        cfg = draw_fields(
            UniformFieldDistribution(config.omega_min, config.omega_max, config.seed),
            config.L,
        )
        run = protocol.sample_protocol(
            cfg, MomentPlan(k=config.k, dt=args.dt), n, config.seed
        )
        _write_lines([run.to_json(include_raw=args.raw)], args.output)
        return 0

    if args.command == "validate-oracle":
        l_values: tuple[int, ...] = (2, 4, 8)
        if args.l is not None:
            if args.l < 1 or (args.l & (args.l - 1)) != 0 or args.l > 16:
                raise ValueError("validate-oracle needs a power-of-two L up to 16")
            l_values = (args.l,)
        results = validate.run_validate(l_values=l_values)
        failed = False
        for name, ok, detail in results:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
            failed = failed or not ok
        return 1 if failed else 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    raise SystemExit(main())
