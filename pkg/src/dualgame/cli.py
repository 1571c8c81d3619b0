"""``dualgame`` command line.

Exit codes: 0 success, 1 property violation, 2 invalid input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .errors import DualGameError
from .game import PRESETS, exact_win_probability, monte_carlo_win_rate
from .info import fuzz_duality, scan_partitions, scenario_duality
from .qcore import max_dim
from .scenario_file import load_scenario, scenario_digest

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2
SIG_DIGITS = 12
FUZZ_DIM_RANGE = (2, 8)


class InputError(Exception):
    pass


def _round(v: Any) -> Any:
    if isinstance(v, bool):
        return v
    if isinstance(v, float):
        return float(f"{v:.{SIG_DIGITS}g}")
    if isinstance(v, dict):
        return {k: _round(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_round(x) for x in v]
    return v


def _fmt(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    return str(v)


def make_report(command: list[str], digest: str, results: dict, verdicts: dict, seed: int | None) -> dict:
    return {
        "command": " ".join(command),
        "inputs_digest": digest,
        "results": _round(results),
        "verdicts": verdicts,
        "seed": seed,
        "tool_version": __version__,
    }


def _print_report(report: dict, out) -> None:
    for key, value in report.items():
        if isinstance(value, dict):
            for k, v in value.items():
                if isinstance(v, list):
                    continue
                print(f"{key}.{k}\t{_fmt(v)}", file=out)
        else:
            print(f"{key}\t{_fmt(value)}", file=out)


def _table(rows: list[dict], out) -> None:
    if not rows:
        return
    cols = list(rows[0])
    print("\t".join(cols), file=out)
    for r in rows:
        print("\t".join(_fmt(r[c]) for c in cols), file=out)


def _scenario(args):
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise InputError(f"unknown preset {args.preset!r}; choose from {', '.join(sorted(PRESETS))}")
        return PRESETS[args.preset]()
    if args.scenario is None:
        raise InputError("one of --scenario or --preset is required")
    return load_scenario(args.scenario)


def cmd_run_game(args, argv) -> tuple[dict, int]:
    s = _scenario(args)
    results: dict[str, Any] = {"scenario": s.name, "N": s.N}
    if args.exact or args.trials is None:
        p = exact_win_probability(s)
        results.update(p_ways=p.p_ways, p_phases=p.p_phases, p_overall=p.p_overall)
    if args.trials is not None:
        if args.trials < 1:
            raise InputError("--trials must be at least 1")
        mc = monte_carlo_win_rate(s, args.trials, args.seed)
        results.update(trials=args.trials, mc_rate=mc.rate, mc_stderr=mc.stderr)
    return make_report(argv, scenario_digest(s), results, {}, args.seed), EXIT_OK


def cmd_check_duality(args, argv) -> tuple[dict, int]:
    s = _scenario(args)
    rep = scenario_duality(s)
    results = {"scenario": s.name, "N": s.N, **rep.as_dict()}
    results.pop("pass")
    results.pop("saturated")
    verdicts = {"pass": rep.passed, "saturated": rep.saturated}
    code = EXIT_OK if rep.passed else EXIT_VIOLATION
    return make_report(argv, scenario_digest(s), results, verdicts, None), code


def cmd_scan_partitions(args, argv) -> tuple[dict, int]:
    if not 1 <= args.n_max <= max_dim():
        raise InputError(f"--n-max must be between 1 and {max_dim()}")
    rows = [
        {
            "N": v.N,
            "n_ways": v.n_ways,
            "n_phases": v.n_phases,
            "info_needed": v.info_needed,
            "info_available": v.info_available,
            "feasible": v.feasible,
            "tight": v.tight,
        }
        for v in scan_partitions(args.n_max)
    ]
    digest = hashlib.sha256(f"scan-partitions:{args.n_max}".encode()).hexdigest()
    symmetric = [r for r in rows if r["n_ways"] == r["n_phases"]]
    results = {
        "n_max": args.n_max,
        "rows": len(rows),
        "symmetric_feasible": sum(r["feasible"] for r in symmetric),
        "symmetric_infeasible": sum(not r["feasible"] for r in symmetric),
        "table": rows,
    }
    return make_report(argv, digest, results, {}, None), EXIT_OK


def _parse_dims(text: str) -> tuple[int, int]:
    try:
        if "-" in text:
            lo, hi = (int(t) for t in text.split("-", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise InputError(f"--dims must look like 2-4 or 3, got {text!r}")
    if not (FUZZ_DIM_RANGE[0] <= lo <= hi <= FUZZ_DIM_RANGE[1]):
        raise InputError(f"--dims must lie within {FUZZ_DIM_RANGE[0]}-{FUZZ_DIM_RANGE[1]}, got {text!r}")
    return lo, hi


def cmd_fuzz(args, argv) -> tuple[dict, int]:
    dims = _parse_dims(args.dims)
    if args.count < 1:
        raise InputError("--count must be at least 1")
    rep = fuzz_duality(args.count, args.seed, dims)
    results = {
        "count": rep.count,
        "dims": f"{dims[0]}-{dims[1]}",
        "min_slack": rep.min_slack,
        "min_holevo_margin": rep.min_holevo_margin,
        "violations": rep.violations,
        "failures": [
            {"seed": f.seed, "index": f.index, "check": f.check, "value": f.value} for f in rep.failures
        ],
    }
    digest = hashlib.sha256(f"fuzz:{args.count}:{args.seed}:{dims}".encode()).hexdigest()
    verdicts = {"pass": rep.violations == 0}
    return make_report(argv, digest, results, verdicts, args.seed), EXIT_OK if rep.violations == 0 else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dualgame", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--scenario", metavar="PATH", help="JSON scenario file")
        g.add_argument("--preset", metavar="NAME", help=f"built-in scenario: {', '.join(PRESETS)}")

    def common(p):
        p.add_argument("--json", metavar="PATH", help="also write the report as JSON")

    p = sub.add_parser("run-game", help="exact and/or Monte Carlo win probabilities")
    scenario_args(p)
    p.add_argument("--trials", type=int, help="Monte Carlo rounds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="compute exact probabilities")
    common(p)
    p.set_defaults(func=cmd_run_game)

    p = sub.add_parser("check-duality", help="check the mutual-information duality relation")
    scenario_args(p)
    common(p)
    p.set_defaults(func=cmd_check_duality)

    p = sub.add_parser("scan-partitions", help="feasibility of partition games up to N")
    p.add_argument("--n-max", type=int, default=36)
    common(p)
    p.set_defaults(func=cmd_scan_partitions)

    p = sub.add_parser("fuzz", help="duality relation on random scenarios")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", default="2-4", help="detector dimension range, within 2-8")
    common(p)
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        report, code = args.func(args, ["dualgame", *argv])
    except (InputError, DualGameError) as exc:
        print(f"dualgame: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _print_report(report, out)
    table = report["results"].get("table")
    if table:
        _table(table, out)
    for f in report["results"].get("failures", []):
        print(f"failure\tseed={f['seed']}\tindex={f['index']}\t{f['check']}\t{_fmt(f['value'])}", file=out)
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
