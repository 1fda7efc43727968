"""Command-line surface: certify, run, sweep, verify.

Outputs are deterministic: identical config and seed give byte-identical CSV
and JSON files (floats are serialized with ``repr``, JSON keys are sorted,
and nothing time- or host-dependent is ever written).

Exit codes: 0 ok, 1 error, 2 numerical blow-up (threshold or step underflow),
3 completed but with bound violations, 4 oracle failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import monitors
from .certificates import CertificateReport, evaluate_certificate
from .config import RunConfig, parse_config
from .errors import ChemfvError
from .grid import integrate, lp_norm, write_field
from .initial import build_initial_data
from .monitors import MonitorRecord, gradv_l2sq, phi_trend
from .oracle import (OracleConfig, estimate_gn_constant, verify_gradient_power_hessian,
                     verify_hessian_gradient, verify_laplacian_vs_hessian,
                     verify_pbar_relations, verify_young_combination)
from .solver import BLOWUP, COMPLETED, CORRUPTED, DT_UNDERFLOW, RunResult, SimState, run

CSV_HEADER = "t,mass_u,sup_u,min_u,sup_v,gradv_l2sq,phi_p,dt"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BLOWUP = 2
EXIT_VIOLATION = 3
EXIT_ORACLE_FAILURE = 4


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(obj, out_dir: Path, filename: str) -> None:
    text = _json_text(obj)
    (out_dir / filename).write_text(text)
    sys.stdout.write(text)


def _csv_text(records: list[MonitorRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join(repr(x) for x in (
            r.t, r.mass_u, r.sup_u, r.min_u, r.sup_v, r.gradv_l2sq, r.phi_p, r.dt)))
    return "\n".join(lines) + "\n"


def _certificate_for(cfg: RunConfig) -> tuple[CertificateReport, SimState]:
    u0, v0 = build_initial_data(cfg.grid, cfg.u0_spec, cfg.v0_spec)
    cert = evaluate_certificate(
        cfg.model, cfg.exponents,
        v0_sup=lp_norm(v0, math.inf),
        u0_mass=integrate(u0),
        gradv0_l2sq=gradv_l2sq(v0),
        domain_volume=cfg.grid.volume,
        k1_literal=cfg.k1_literal,
    )
    return cert, SimState(0.0, u0, v0)


@dataclass
class ExecutedRun:
    result: RunResult
    records: list[MonitorRecord]
    cert: CertificateReport
    violations: list[dict]


def _execute(cfg: RunConfig) -> ExecutedRun:
    cert, initial = _certificate_for(cfg)
    records: list[MonitorRecord] = []

    def hook(state: SimState, dt: float) -> None:
        records.append(monitors.record(state, dt, cert, cfg.monitor))

    result = run(initial, cfg.model, cfg.solver, hook)
    violations = [
        {"t": r.t, **viol.as_dict()} for r in records for viol in r.violations
    ]
    return ExecutedRun(result, records, cert, violations)


def _exit_code_for(status: str, violations: list) -> int:
    if status in (BLOWUP, DT_UNDERFLOW):
        return EXIT_BLOWUP
    if status == CORRUPTED:
        return EXIT_ERROR
    if status == COMPLETED and violations:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_certify(cfg: RunConfig, out_dir: Path) -> int:
    cert, _ = _certificate_for(cfg)
    _emit(cert.as_dict(), out_dir, "certificate.json")
    return EXIT_OK


def cmd_run(cfg: RunConfig, out_dir: Path, dump_fields: bool) -> int:
    executed = _execute(cfg)
    result = executed.result
    (out_dir / "timeseries.csv").write_text(_csv_text(executed.records))
    bounded = None
    if len(executed.records) >= 2:
        bounded = phi_trend(executed.records).bounded
    summary = {
        "schema": 1,
        "status": result.status,
        "t_end_reached": result.status == COMPLETED,
        "sup_u_max": result.sup_u_max,
        "phi_bounded": bounded,
        "violations": executed.violations,
        "certificate": executed.cert.as_dict(),
    }
    _emit(summary, out_dir, "summary.json")
    if dump_fields or cfg.dump_fields:
        write_field(result.state.u, out_dir / "u_final.csv")
        write_field(result.state.v, out_dir / "v_final.csv")
    return _exit_code_for(result.status, executed.violations)


def sweep_report(cfg: RunConfig, run_once=None) -> dict:
    """Bisect mu on the predicate "completed with no bound violations".

    ``run_once(mu) -> (status, bounded, extras)`` is injectable for tests; the
    default executes a full simulation with mu overridden.  Endpoints are
    probed first; bisection proceeds only while they bracket the frontier.
    """
    spec = cfg.sweep
    if spec is None:
        raise ChemfvError("config has no [sweep] section")

    if run_once is None:
        def run_once(mu: float):
            sub = replace(cfg, model=replace(cfg.model, mu=mu))
            executed = _execute(sub)
            bounded = executed.result.status == COMPLETED and not executed.violations
            return executed.result.status, bounded, {
                "sup_u_max": executed.result.sup_u_max,
                "violations": len(executed.violations),
            }

    runs = []
    errors = 0

    def probe(mu: float) -> bool:
        nonlocal errors
        try:
            status, bounded, extras = run_once(mu)
        except ChemfvError as exc:
            errors += 1
            runs.append({"mu": mu, "status": f"error: {exc}", "bounded": False})
            return False
        runs.append({"mu": mu, "status": status, "bounded": bounded, **extras})
        return bounded

    lo_bounded = probe(spec.mu_lo)
    hi_bounded = probe(spec.mu_hi)
    if not lo_bounded and hi_bounded:
        lo, hi = spec.mu_lo, spec.mu_hi
        for _ in range(spec.bisection_steps):
            mid = 0.5 * (lo + hi)
            if probe(mid):
                hi = mid
            else:
                lo = mid

    unbounded_mus = [r["mu"] for r in runs if not r["bounded"]]
    bounded_mus = [r["mu"] for r in runs if r["bounded"]]
    cert, _ = _certificate_for(cfg)
    mu_min = cert.mu_min
    contradicted = any(r["mu"] > mu_min and not r["bounded"] for r in runs)
    report = {
        "schema": 1,
        "mu_empirical_lo": max(unbounded_mus) if unbounded_mus else None,
        "mu_empirical_hi": min(bounded_mus) if bounded_mus else None,
        "mu_min_certificate": mu_min,
        "sufficiency_contradicted": contradicted,
        "runs": runs,
    }
    if errors == len(runs):
        report["all_runs_errored"] = True
    return report


def cmd_sweep(cfg: RunConfig, out_dir: Path) -> int:
    report = sweep_report(cfg)
    _emit(report, out_dir, "sweep.json")
    if report.get("all_runs_errored"):
        return EXIT_ERROR
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out_dir: Path, poison_d3: bool) -> int:
    oracle_cfg = OracleConfig(
        grid=cfg.grid, trials=cfg.oracle_trials, seed=cfg.oracle_seed,
        q=cfg.oracle_q, num_modes=cfg.oracle_num_modes,
    )
    verdicts = [
        verify_laplacian_vs_hessian(oracle_cfg),
        verify_hessian_gradient(oracle_cfg),
        verify_gradient_power_hessian(oracle_cfg),
        verify_young_combination(oracle_cfg, poison_d3=1.0 if poison_d3 else 0.0),
        verify_pbar_relations(oracle_cfg, cfg.model.n, cfg.model.m, cfg.model.alpha,
                              cfg.exponents.q1, cfg.exponents.q2),
    ]
    gn_constant = estimate_gn_constant(oracle_cfg)
    all_passed = all(v.passed for v in verdicts) and math.isfinite(gn_constant)
    payload = {
        "schema": 1,
        "all_passed": all_passed,
        "gn_empirical_constant": gn_constant,
        "verdicts": [
            {
                "inequality_name": v.inequality_name,
                "trials_run": v.trials_run,
                "worst_margin": v.worst_margin,
                "passed": v.passed,
                "slack": v.slack,
            }
            for v in verdicts
        ],
    }
    _emit(payload, out_dir, "verify.json")
    return EXIT_OK if all_passed else EXIT_ORACLE_FAILURE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chemfv",
        description="Finite-volume chemotaxis-consumption simulator and "
                    "boundedness certificate engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("certify", "evaluate the damping-threshold certificate"),
        ("run", "simulate and monitor the certified bounds"),
        ("sweep", "bisect mu for the empirical boundedness frontier"),
        ("verify", "run the inequality oracles"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the INI config file")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="override a config value (repeatable)")
        p.add_argument("--seed", type=int, default=None, help="override the oracle seed")
        p.add_argument("--out", default=None, help="output directory (default: [output] dir)")
        if name == "run":
            p.add_argument("--dump-fields", action="store_true",
                           help="write final u and v fields")
        if name == "verify":
            p.add_argument("--poison-d3", action="store_true",
                           help="negative-control hook: corrupt the Young defect constant")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        cfg = parse_config(text, tuple(args.set))
        if args.seed is not None:
            cfg = replace(cfg, oracle_seed=args.seed)
        out_dir = Path(args.out if args.out is not None else cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "certify":
            return cmd_certify(cfg, out_dir)
        if args.command == "run":
            return cmd_run(cfg, out_dir, args.dump_fields)
        if args.command == "sweep":
            return cmd_sweep(cfg, out_dir)
        return cmd_verify(cfg, out_dir, args.poison_d3)
    except ChemfvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
