"""Command-line entry point.

Exit codes: 0 success, 2 validation error, 3 analysis error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .errors import AmktError, IoError, ValidationError
from .montecarlo import convergence_sweep, spawn_seeds
from .report import convergence_csv, emit, write_text
from .runner import ANALYSES, run, run_sweep
from .scenario import PIGOUVIAN, SweepSpec, load_scenario
from .intervention import pigouvian_fee

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ANALYSIS = 3
EXIT_IO = 4

log = logging.getLogger("amkt")


def _analyses(value: str) -> list[str]:
    return value.split(",")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument(
        "--analyses",
        type=_analyses,
        default=None,
        help=f"comma-separated subset of {','.join(ANALYSES)} (default: all)",
    )
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--seed", type=int, default=None, help="Monte Carlo seed, overrides sim.seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="amkt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"amkt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="run analyses on one scenario")
    _common(ev)

    sw = sub.add_parser("sweep", help="re-run analyses over a grid of one parameter")
    _common(sw)
    sw.add_argument("--param", help="dotted parameter path, e.g. market.v or publishers.p1.phi")
    sw.add_argument("--lo", type=float)
    sw.add_argument("--hi", type=float)
    sw.add_argument("--steps", type=int)

    cv = sub.add_parser("converge", help="Monte Carlo convergence table as CSV")
    cv.add_argument("scenario")
    cv.add_argument("--seeds", type=int, default=50, help="number of runs per population size")
    cv.add_argument("--m", default="100,1000,10000", help="comma-separated population sizes")
    cv.add_argument("--seed", type=int, default=0, help="root seed the run seeds are spawned from")
    cv.add_argument("--tau", default="0", help=f'per-delegation fee, a number or "{PIGOUVIAN}"')
    cv.add_argument("--out", default=None)
    return parser


def _sweep_spec(args, scenario) -> SweepSpec:
    base = scenario.sweep
    given = {k: getattr(args, k) for k in ("param", "lo", "hi", "steps")}
    if base is None and any(v is None for v in given.values()):
        missing = [k for k, v in given.items() if v is None]
        raise ValidationError("sweep", f"missing --{', --'.join(missing)} and no sweep block in the scenario")
    if base is not None:
        given = {k: (v if v is not None else getattr(base, k)) for k, v in given.items()}
    return SweepSpec(**given)


def _dispatch(args) -> None:
    scenario = load_scenario(args.scenario)
    if args.command == "converge":
        tau = pigouvian_fee(scenario.market) if args.tau == PIGOUVIAN else float(args.tau)
        try:
            m_grid = [int(x) for x in args.m.split(",")]
        except ValueError:
            raise ValidationError("--m", f"expected comma-separated integers, got {args.m!r}") from None
        table = convergence_sweep(scenario.market, spawn_seeds(args.seed, args.seeds), m_grid, tau=tau)
        write_text(convergence_csv(table), args.out)
        return
    if args.command == "eval":
        report = run(scenario, args.analyses, seed=args.seed)
    else:
        report = run_sweep(scenario, args.analyses, _sweep_spec(args, scenario), seed=args.seed)
    emit(report, args.format, args.out)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="amkt: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        _dispatch(args)
    except ValidationError as exc:
        _diagnose("validation", exc, getattr(exc, "field", None))
        return EXIT_VALIDATION
    except IoError as exc:
        _diagnose("io", exc, None)
        return EXIT_IO
    except (AmktError, ArithmeticError, ValueError) as exc:
        _diagnose("analysis", exc, getattr(exc, "field", None))
        return EXIT_ANALYSIS
    return EXIT_OK


def _diagnose(kind: str, exc: Exception, field) -> None:
    block = {"error": kind, "type": type(exc).__name__, "field": field, "message": str(exc)}
    sys.stderr.write(json.dumps({"diagnostics": block}, sort_keys=True) + "\n")


if __name__ == "__main__":
    sys.exit(main())
