"""Command-line interface: plan scenarios, run the case catalog, run
feasibility studies, and validate configuration files.

Artifacts are written per run into an output directory: a trajectory table
(CSV, substep resolution, angles in degrees), a vector plot, a metadata
document, and optionally a line-delimited solver trace.  Every run that
reports feasibility is re-checked by an audit that shares no code with the
solver's constraint assembly; an audit failure downgrades the exit status.

Exit codes: 0 success, 2 file parse error, 3 invalid configuration,
4 planner finished without a feasible trajectory, 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .io import (ConfigError, ParseError, bundled_path, canonical_json,
                 load_port, load_scenario, load_ship, load_study,
                 spec_digest, write_trajectory_csv)
from .plotting import plot_plan, plot_study
from .scenarios import (audit_plan, case_config, case_scenario,
                        run_feasibility_study, run_with_recomputation)
from .solver import SolverOptions
from .transcription import build_nlp, simulate_plan

__all__ = ["main"]

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_INFEASIBLE = 4
EXIT_INTERNAL = 5


# ----------------------------------------------------------------------
# shared plumbing
# ----------------------------------------------------------------------

def _jsonable(value):
    """Recursively convert numpy scalars/arrays for json.dump."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


def _overrides_from(args) -> dict:
    over = {}
    if getattr(args, "segments", None) is not None:
        over["n_segments"] = args.segments
    if getattr(args, "no_speed_constraint", False):
        over["speed_constraint"] = False
    if getattr(args, "collision_mode", None) is not None:
        over["collision_mode"] = args.collision_mode
    return over


def _solver_options(args) -> SolverOptions:
    return SolverOptions(max_iterations=getattr(args, "max_iterations", 200))


def _nlp_metadata(nlp) -> dict:
    return {
        "variables": nlp.n,
        "equalities": nlp.n_eq,
        "inequalities": nlp.n_in,
        "eq_groups": {name: [sl.start, sl.stop]
                      for name, sl in nlp.eq_groups},
        "in_groups": {name: [sl.start, sl.stop]
                      for name, sl in nlp.in_groups},
    }


def _write_trace(path: Path, attempts) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for attempt in attempts:
            for rec in attempt.trace:
                handle.write(canonical_json({
                    "attempt": attempt.index,
                    "iteration": rec.iteration,
                    "objective": float(rec.objective),
                    "violation": float(rec.violation),
                    "step_norm": float(rec.step_norm),
                }) + "\n")


def _run_one(scenario, args, out_dir: Path, label: str,
             compare_x=None) -> dict:
    """Plan one scenario and write its artifact set; returns a summary."""
    spec = scenario.spec
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    attempts = run_with_recomputation(spec, options=_solver_options(args),
                                      attempts=args.attempts,
                                      seed=args.seed)
    wall = time.perf_counter() - t0
    chosen = next((a for a in attempts if a.feasible), attempts[-1])

    times, states, commanded, actual = simulate_plan(spec, chosen.x)
    write_trajectory_csv(out_dir / "trajectory.csv", times, states,
                         commanded, actual)
    plot_plan(spec, chosen.x, out_dir / "plan.svg",
              title=f"{scenario.name}: {chosen.status}", compare=compare_x)
    if args.trace:
        _write_trace(out_dir / "trace.jsonl", attempts)

    audit = audit_plan(spec, chosen.x) if chosen.feasible else None
    meta = {
        "scenario": scenario.name,
        "label": label,
        "description": scenario.description,
        "spec_sha256": spec_digest(spec),
        "seed": args.seed,
        "status": chosen.status,
        "feasible": chosen.feasible,
        "feasible_attempt": chosen.index if chosen.feasible else None,
        "attempts": [{
            "index": a.index, "status": a.status, "feasible": a.feasible,
            "iterations": a.iterations, "objective": a.objective,
            "max_violation": a.max_violation, "kkt": a.kkt,
            "wall_time": a.wall_time, "tf": a.tf,
        } for a in attempts],
        "tf": chosen.tf,
        "wall_time_s": wall,
        "nlp": _nlp_metadata(build_nlp(spec)),
        "audit": audit,
        "files": {"ship": str(scenario.ship_file),
                  "port": str(scenario.port_file)},
    }
    with open(out_dir / "metadata.json", "w", encoding="utf-8") as handle:
        json.dump(_jsonable(meta), handle, indent=2, sort_keys=True)

    print(f"  {label}: {chosen.status}  tf={chosen.tf:.1f} s  "
          f"iterations={chosen.iterations}  wall={wall:.1f} s")
    if audit is not None and not audit["ok"]:
        print(f"  {label}: AUDIT FAILED: {audit}")
    return {"label": label, "status": chosen.status,
            "feasible": chosen.feasible, "audit_ok":
                bool(audit["ok"]) if audit is not None else None,
            "tf": chosen.tf, "wall": wall, "x": chosen.x}


# ----------------------------------------------------------------------
# verbs
# ----------------------------------------------------------------------

def cmd_plan(args) -> int:
    scenario = load_scenario(args.scenario, ship_path=args.ship,
                             port_path=args.port,
                             overrides=_overrides_from(args))
    out_dir = Path(args.out or f"runs/{scenario.name}")
    print(f"planning '{scenario.name}' -> {out_dir}")
    result = _run_one(scenario, args, out_dir, scenario.name)
    if not result["feasible"]:
        return EXIT_INFEASIBLE
    if result["audit_ok"] is False:
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_cases(args) -> int:
    ids = ([int(v) for v in args.only.split(",")] if args.only
           else list(range(1, 7)))
    for case_id in ids:
        case_config(case_id)  # raises on bad --only values
    template = load_scenario(bundled_path("scenario_case1.yaml"),
                             ship_path=args.ship, port_path=args.port,
                             overrides=_overrides_from(args))
    out_root = Path(args.out or "runs/cases")
    out_root.mkdir(parents=True, exist_ok=True)
    rows = []
    worst = EXIT_OK
    for case_id in ids:
        scenario = case_scenario(case_id, template)
        print(f"case {case_id} ({case_config(case_id).tag}) "
              f"-> {out_root}/case{case_id}")
        runs = {}
        for label, speed in (("limited", True), ("unlimited", False)):
            spec = replace(scenario.spec, speed_constraint=speed)
            variant = replace(scenario, spec=spec)
            sub = out_root / f"case{case_id}" / label
            try:
                runs[label] = _run_one(
                    variant, args, sub, f"case{case_id}/{label}",
                    compare_x=None if speed else runs["limited"]["x"])
            except Exception as exc:  # keep the batch going
                print(f"  case{case_id}/{label}: ERROR: {exc}")
                runs[label] = {"label": label, "status": "error",
                               "feasible": False, "audit_ok": None,
                               "tf": float("nan"), "wall": float("nan"),
                               "x": None}
            rows.append((case_id, label, runs[label]))
            if not runs[label]["feasible"]:
                worst = max(worst, EXIT_INFEASIBLE)
    with open(out_root / "summary.csv", "w", encoding="utf-8") as handle:
        handle.write("case,mode,status,tf_s,wall_s\n")
        for case_id, label, run in rows:
            handle.write(f"{case_id},{label},{run['status']},"
                         f"{run['tf']:.9g},{run['wall']:.3f}\n")
    print(f"summary -> {out_root}/summary.csv")
    return worst


def cmd_feasibility(args) -> int:
    study = load_study(args.study, overrides=_overrides_from(args))
    n_cases = args.cases or study.n_cases
    seed = args.seed if args.seed is not None else study.seed
    attempts = args.attempts or study.attempts
    out_dir = Path(args.out or f"runs/{study.name}")
    out_dir.mkdir(parents=True, exist_ok=True)
    print(f"study '{study.name}': {n_cases} cases, seed {seed}, "
          f"attempts {attempts} -> {out_dir}")

    def progress(record, total):
        tag = ("feasible at attempt "
               f"{record.feasible_attempt}"
               if record.feasible_attempt is not None else "infeasible")
        print(f"  case {record.index + 1}/{total}: {tag} "
              f"({record.wall_time:.1f} s)")

    report = run_feasibility_study(
        n_cases, seed, template=study.scenario,
        options=_solver_options(args), attempts=attempts,
        progress=progress)

    with open(out_dir / "report.json", "w", encoding="utf-8") as handle:
        handle.write(report.canonical_json())
    report.to_json(out_dir / "report_timed.json")
    with open(out_dir / "cases.csv", "w", encoding="utf-8") as handle:
        handle.write("case,draws,distance_m,feasible_attempt,wall_s\n")
        for rec in report.records:
            d0 = float(np.hypot(rec.case.start.x0, rec.case.start.y0))
            fa = (rec.feasible_attempt
                  if rec.feasible_attempt is not None else "")
            handle.write(f"{rec.index},{rec.case.draws},{d0:.9g},"
                         f"{fa},{rec.wall_time:.3f}\n")
    plot_study(report, out_dir / "study.svg")
    lines = report.summary_lines()
    with open(out_dir / "summary.txt", "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return EXIT_OK


_LOADERS = {"ship": load_ship, "port": load_port,
            "scenario": load_scenario, "study": load_study}


def cmd_validate(args) -> int:
    import yaml
    worst = EXIT_OK
    for name in args.files:
        path = Path(name)
        try:
            try:
                doc = yaml.safe_load(path.read_text())
            except (OSError, yaml.YAMLError) as exc:
                raise ParseError(f"{path}: {exc}") from exc
            kind = doc.get("kind") if isinstance(doc, dict) else None
            if kind not in _LOADERS:
                raise ParseError(f"{path}: unknown or missing kind {kind!r}")
            _LOADERS[kind](path)
        except ParseError as exc:
            print(f"FAIL  {exc}")
            worst = max(worst, EXIT_PARSE)
        except ConfigError as exc:
            print(f"FAIL  {exc}")
            worst = max(worst, EXIT_INVALID)
        else:
            print(f"ok    {path} ({kind})")
    return worst


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="berthplan",
        description="Trajectory planning for automatic ship berthing.")
    sub = parser.add_subparsers(dest="verb", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ship", metavar="FILE",
                        help="replace the scenario's ship file")
    common.add_argument("--port", metavar="FILE",
                        help="replace the scenario's port file")
    common.add_argument("--segments", type=int, metavar="N",
                        help="override the number of shooting segments")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for retry control draws (default 0)")
    common.add_argument("--no-speed-constraint", action="store_true",
                        help="drop the approach-speed corridor rows")
    common.add_argument("--collision-mode", choices=("winding", "smooth"),
                        help="collision constraint form")
    common.add_argument("--trace", action="store_true",
                        help="write a line-delimited solver trace")
    common.add_argument("--out", metavar="DIR",
                        help="output directory (default runs/<name>)")
    common.add_argument("--attempts", type=int, default=4,
                        help="planning attempts, 1-4 (default 4)")
    common.add_argument("--max-iterations", type=int, default=200,
                        help="solver iteration cap per attempt")

    p = sub.add_parser("plan", parents=[common],
                       help="plan one scenario file")
    p.add_argument("scenario", help="scenario YAML file")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("cases", parents=[common],
                       help="run the bundled case catalog, with and "
                            "without speed limits")
    p.add_argument("--only", metavar="IDS",
                   help="comma-separated case ids (default all six)")
    p.set_defaults(func=cmd_cases)

    p = sub.add_parser("feasibility", parents=[common],
                       help="run a stochastic feasibility study")
    p.add_argument("study", help="study YAML file")
    p.add_argument("--cases", type=int, metavar="N",
                   help="override the study's case count")
    p.set_defaults(func=cmd_feasibility, seed=None, attempts=None)

    p = sub.add_parser("validate", help="check configuration files")
    p.add_argument("files", nargs="+", help="YAML files of any kind")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
