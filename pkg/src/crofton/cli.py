"""Command-line runner: ``crofton {estimate,verify,convergence} --config FILE``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import replace
from typing import Optional, Sequence

from .bodies import exact_intrinsic_volume
from .estimators import EstimatorSpec, Indices, rotational_crofton_estimate, vertical_sections_estimate
from .exceptions import DomainError, NotAvailableError
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ResultRow,
    convergence_schedule,
    emit_csv,
    load_config,
    write_csv,
)
from .validation import check_subspace
from .verify import CheckReport, SIGMA, default_battery, run_battery

log = logging.getLogger("crofton")

JOBS_ENV = "CROFTON_JOBS"
EXIT_OK, EXIT_STAT_FAIL, EXIT_CONFIG = 0, 1, 2


def _spec(cfg: ExperimentConfig, outer: Optional[int] = None) -> EstimatorSpec:
    L0 = check_subspace(cfg.L0, cfg.n, cfg.r)
    return EstimatorSpec(Indices(cfg.n, cfg.k, cfg.r, cfg.j, cfg.q), cfg.body, L0,
                         outer_samples=outer or cfg.outer_samples, inner_samples=cfg.inner_samples,
                         reference_radius=cfg.reference_radius, seed=cfg.seed, design=cfg.design,
                         route=cfg.route, chunk_size=cfg.chunk_size)


def _exact(cfg: ExperimentConfig) -> Optional[float]:
    try:
        return exact_intrinsic_volume(cfg.body, cfg.n - cfg.j)
    except NotAvailableError:
        return None


def _estimate_row(cfg: ExperimentConfig, jobs: int, outer: Optional[int] = None) -> ResultRow:
    spec = _spec(cfg, outer)
    start = time.perf_counter()
    if cfg.design == "rotational":
        est = rotational_crofton_estimate(spec, jobs=jobs)
    else:
        est = vertical_sections_estimate(spec, jobs=jobs)
    seconds = time.perf_counter() - start
    exact = _exact(cfg)
    row = ResultRow.build(experiment_id=cfg.experiment_id, mode=cfg.mode, n=cfg.n, k=cfg.k, r=cfg.r, j=cfg.j,
                          q=cfg.q, body=cfg.body_tag, mean=est.mean, stderr=est.stderr, exact=exact,
                          samples=est.count, seconds=seconds)
    return replace(row, passed=row.z is None or abs(row.z) <= SIGMA)


def _report_row(cfg: ExperimentConfig, label: str, rep: CheckReport, seconds: float) -> ResultRow:
    z = (rep.lhs_value - rep.rhs_value) / rep.stderr if rep.stderr > 0 else None
    return ResultRow(experiment_id=f"{cfg.experiment_id}:{label}", mode="verify", n=None, k=None, r=None,
                     j=None, q=None, body=rep.name, mean=rep.lhs_value, stderr=rep.stderr,
                     exact=rep.rhs_value, z=z, samples=rep.samples, seconds=seconds, passed=rep.passed)


def run(cfg: ExperimentConfig, jobs: int = 1) -> list[ResultRow]:
    """Execute an experiment; output depends only on (config, seed), never on ``jobs``."""
    if jobs < 1:
        raise DomainError(f"jobs must be a positive integer, got {jobs}")
    if cfg.mode == "estimate":
        return [_estimate_row(cfg, jobs)]
    if cfg.mode == "convergence":
        return [_estimate_row(cfg, jobs, outer=count) for count in convergence_schedule(cfg.outer_samples)]
    labels = [label for label, _, _ in default_battery(cfg.scale)]
    if cfg.checks:
        missing = sorted(set(cfg.checks) - set(labels))
        if missing:
            raise ConfigError(f"config key 'checks': unknown checks {missing}; available: {labels}")
    selected = [lab for lab in labels if not cfg.checks or lab in cfg.checks]
    start = time.perf_counter()
    reports = run_battery(cfg.seed, jobs=jobs, scale=cfg.scale, select=lambda lab: lab in selected)
    per = (time.perf_counter() - start) / max(len(reports), 1)
    return [_report_row(cfg, lab, rep, per) for lab, rep in zip(selected, reports)]


def _summary(rows: Sequence[ResultRow]) -> str:
    lines = []
    for row in rows:
        status = "ok" if row.passed else "FAIL"
        exact = "" if row.exact is None else f" exact={row.exact:.10g}"
        z = "" if row.z is None else f" z={row.z:+.2f}"
        lines.append(f"{status:4s} {row.experiment_id} [{row.body}] mean={row.mean:.10g} "
                     f"stderr={row.stderr:.3g}{exact}{z} N={row.samples} ({row.seconds:.2f}s)")
    return "\n".join(lines)


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        jobs = int(raw)
    except ValueError:
        raise ConfigError(f"environment variable {JOBS_ENV} must be a positive integer, got {raw!r}") from None
    if jobs < 1:
        raise ConfigError(f"environment variable {JOBS_ENV} must be a positive integer, got {raw!r}")
    return jobs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crofton", description=(
        "Monte Carlo intrinsic volumes from sections through a fixed subspace, and numerical checks "
        "of the underlying integral-geometric identities."))
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("estimate", "single estimate of V_{n-j}"),
                        ("verify", "run the verification battery"),
                        ("convergence", "estimates at 10^3, 10^4, ... samples up to the budget")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=name != "verify", help="TOML experiment file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--jobs", type=int, help=f"worker threads (default ${JOBS_ENV} or 1)")
        p.add_argument("--out", help="CSV output path (default: config 'output' or stdout)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.config:
            cfg = load_config(args.config)
        else:
            cfg = ExperimentConfig(mode="verify", experiment_id="verify", seed=20240101)
        if cfg.mode != args.command:
            cfg = replace(cfg, mode=args.command)
        if args.command != "verify" and cfg.body is None:
            raise ConfigError(f"mode={args.command} needs indices and a body in the config")
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative")
            cfg = replace(cfg, seed=args.seed)
        jobs = args.jobs if args.jobs is not None else _default_jobs()
        if jobs < 1:
            raise ConfigError("--jobs must be a positive integer")
        log.info("running %s with %d job(s)", cfg.experiment_id, jobs)
        rows = run(cfg, jobs)
    except (DomainError, NotAvailableError, OSError) as exc:
        print(f"crofton: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.output
    if out:
        emit_csv(rows, out)
    else:
        write_csv(rows, sys.stdout)
    print(_summary(rows), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_STAT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
