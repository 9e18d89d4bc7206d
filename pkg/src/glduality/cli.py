"""Command line front end.

    glduality simulate <config>            trajectory table + report
    glduality period <config>              three period routes
    glduality dualize <config> [--round-trip]
    glduality verify <dir> [--jobs N]      run every scenario's verify section

Exit codes: 0 ok, 1 verification failed, 2 configuration error, 3 integration
failure, 4 unbound orbit, 5 degenerate class.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import ConfigError, ScenarioConfig, load_scenario
from .errors import DegenerateClass, GLError, Unbound
from .report import write_report, write_table
from .scenarios import run_dualize, run_period, run_simulate, verify_scenario

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_UNBOUND = 4
EXIT_DEGENERATE = 5


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, DegenerateClass):
        return EXIT_DEGENERATE
    if isinstance(exc, Unbound):
        return EXIT_UNBOUND
    return EXIT_INTEGRATION


def _table_path(base: Path, name: str, fmt: str) -> Path:
    path = base / name
    if fmt == "tsv" and path.suffix == ".csv":
        path = path.with_suffix(".tsv")
    return path


def _sibling(path: Path, tag: str) -> Path:
    """``traj.csv`` -> ``traj.<tag>.csv``."""
    return path.with_name(f"{path.stem}.{tag}{path.suffix}")


def _delimiter(fmt: str) -> str:
    return "\t" if fmt == "tsv" else ","


def cmd_simulate(cfg: ScenarioConfig, args) -> int:
    table, report, traj = run_simulate(cfg)
    out = Path(args.output_dir)
    traj_path = _table_path(out, cfg.output.trajectory_path, args.format)
    report_path = out / cfg.output.report_path
    report["trajectory_file"] = traj_path.name
    write_table(traj_path, table.header, table.columns, _delimiter(args.format))
    write_report(report_path, report)
    if args.figures:
        from .plotting import simulate_figure

        simulate_figure(traj, report_path.with_suffix(".png"), cfg.name)
    print(f"wrote {traj_path} and {report_path}")
    return EXIT_OK


def cmd_period(cfg: ScenarioConfig, args) -> int:
    report = run_period(cfg)
    path = _sibling(Path(args.output_dir) / cfg.output.report_path, "period")
    write_report(path, report)
    per = report["periods"]
    for route in ("measured", "quadrature", "closed_form", "legendre_form"):
        value = per[route]
        print(f"{route:>14}: {'n/a' if value is None else format(value, '.15g')}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_dualize(cfg: ScenarioConfig, args) -> int:
    table, report, source, dual = run_dualize(cfg, with_round_trip=args.round_trip)
    out = Path(args.output_dir)
    traj_path = _sibling(_table_path(out, cfg.output.trajectory_path, args.format), "dual")
    report_path = _sibling(out / cfg.output.report_path, "dual")
    report["trajectory_file"] = traj_path.name
    write_table(traj_path, table.header, table.columns, _delimiter(args.format))
    write_report(report_path, report)
    if args.figures:
        from .plotting import dual_figure

        dual_figure(source, dual, report_path.with_suffix(".png"), cfg.name)
    res = report["residual"]
    print(f"kappa formula {res['kappa_formula']:.15g}  fitted {res['kappa_fit']:.15g}  "
          f"residual (fitted) {res['residual_fit']:.3e}")
    print(f"wrote {traj_path} and {report_path}")
    return EXIT_OK


def _verify_one(path: str, seed: int) -> dict:
    try:
        cfg = load_scenario(path)
        result = verify_scenario(cfg, seed)
    except GLError as exc:
        name = Path(path).stem
        return {"name": name, "passed": False, "error": str(exc), "exit_code": exit_code_for(exc), "checks": []}
    result["file"] = Path(path).name
    return result


def cmd_verify(directory: Path, args) -> int:
    if not directory.is_dir():
        print(f"error: {directory} is not a directory", file=sys.stderr)
        return EXIT_CONFIG
    files = sorted(str(p) for p in directory.iterdir() if p.suffix in (".yaml", ".yml"))
    if not files:
        print(f"error: no scenario files in {directory}", file=sys.stderr)
        return EXIT_CONFIG
    seeds = [args.seed] * len(files)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_one, files, seeds))
    else:
        results = [_verify_one(f, s) for f, s in zip(files, seeds)]
    results.sort(key=lambda r: r["name"])
    passed = all(r["passed"] for r in results)
    for r in results:
        if "error" in r:
            print(f"FAIL {r['name']}: {r['error']}")
            continue
        for c in r["checks"]:
            value = "n/a" if c["value"] is None else f"{c['value']:.3e}"
            print(f"{'PASS' if c['passed'] else 'FAIL'} {r['name']}:{c['check']} = {value} (tol {c['tol']:g})")
    summary = {"passed": passed, "seed": args.seed, "scenarios": results}
    path = Path(args.output_dir) / "verify_report.json"
    write_report(path, summary)
    print(f"{'all scenarios passed' if passed else 'verification FAILED'}; wrote {path}")
    return EXIT_OK if passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=".", help="directory for written files (default: .)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized scenarios")
    common.add_argument("--format", choices=("csv", "tsv"), default="csv", help="trajectory table format")
    common.add_argument("--figures", action="store_true", help="also save a PNG figure next to the report")

    parser = argparse.ArgumentParser(prog="glduality", description="Generalized Gorringe-Leach motions and their duals.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("simulate", "integrate a scenario"), ("period", "compare period routes"),
                           ("dualize", "transform a pseudomotion to its dual class")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("config", help="scenario YAML file")
        if name == "dualize":
            p.add_argument("--round-trip", action="store_true", help="also map back and report the mismatch")
    p = sub.add_parser("verify", parents=[common], help="run a directory of scenarios")
    p.add_argument("directory", help="directory of scenario YAML files")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    return parser


_COMMANDS = {"simulate": cmd_simulate, "period": cmd_period, "dualize": cmd_dualize}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            if args.jobs < 1:
                raise ConfigError("--jobs must be at least 1")
            return cmd_verify(Path(args.directory), args)
        cfg = load_scenario(args.config)
        return _COMMANDS[args.command](cfg, args)
    except GLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
