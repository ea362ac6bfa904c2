"""Command-line entry point.

Exit codes: 0 success, 1 infeasible scenario or failed planner, 2 malformed
input. Errors are reported as one line on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import corpus, io
from .compare import compare_scenarios
from .errors import (
    BenchmarkFailedError,
    CannotFixChargeError,
    DronePlanError,
    InfeasibleScenarioError,
    InfeasibleSiteError,
    OracleLimitError,
)
from .model import PRESETS, fit_coefficients, read_telemetry_csv
from .planner import find_plan, plan_benchmark, plan_exact, plan_variable_speed
from .planner.exact import ExactLimits
from .scenario import Scenario, WindDomain, dump_scenario, load_scenario, validate

EXIT_OK, EXIT_INFEASIBLE, EXIT_MALFORMED = 0, 1, 2
_INFEASIBLE = (InfeasibleSiteError, InfeasibleScenarioError, CannotFixChargeError, BenchmarkFailedError)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        # one diagnostic line instead of usage plus message
        self.exit(EXIT_MALFORMED, f"{self.prog}: error: {message}\n")


def _wind(text: str) -> WindDomain:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad wind {text!r}") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("wind takes smin,smax,theta1,theta2")
    try:
        return WindDomain.from_degrees(*parts)
    except DronePlanError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _scenario(args: argparse.Namespace) -> Scenario:
    s = load_scenario(args.scenario)
    if getattr(args, "preset", None):
        s = dataclasses.replace(s, coeffs=PRESETS[args.preset])
    if getattr(args, "wind", None) is not None:
        s = s.with_wind(args.wind)
    if getattr(args, "speed", None) is not None:
        s = s.with_speeds(args.speed)
    return s


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_plan(args, s, plan, report=None) -> None:
    out = _out_dir(args)
    io.dump_plan(out / "plan.json", s, plan, report)
    io.write_soc_csv(out / "soc.csv", s, plan)
    io.write_svg(out / "map.svg", s, plan)
    print(f"trip {plan.objective_s:.1f} s over {len(plan.stops)} stops -> {out}")


def cmd_plan(args) -> int:
    s = _scenario(args)
    if len(s.speed_options) > 1:
        plan, report = plan_variable_speed(s, local_search=args.local_search)
    else:
        plan, report = find_plan(s, local_search=args.local_search)
    try:
        opt = plan_exact(s, speed=plan.speed).opt_relaxed
    except OracleLimitError:
        opt = None
    if opt:
        report = dataclasses.replace(report, ratio_vs_oracle=report.modified_cost_wh / opt)
    _write_plan(args, s, plan, report)
    return EXIT_OK


def cmd_benchmark(args) -> int:
    s = _scenario(args)
    plan, report = plan_benchmark(s)
    _write_plan(args, s, plan, report)
    return EXIT_OK


def cmd_exact(args) -> int:
    s = _scenario(args)
    result = plan_exact(s, ExactLimits(args.max_sites, args.max_stations))
    _write_plan(args, s, result.plan)
    return EXIT_OK


def cmd_compare(args) -> int:
    if args.scenario:
        named = [(Path(p).stem, load_scenario(p)) for p in args.scenario]
    else:
        spec = corpus.CorpusSpec(args.sites, args.stations, args.preset or "3dr-solo")
        named = [
            (f"seed{args.seed}_{k:03d}", s)
            for k, s in enumerate(corpus.generate_corpus(args.seed, args.count, spec))
        ]
    report = compare_scenarios(named, jobs=args.jobs)
    out = _out_dir(args)
    (out / "compare.json").write_text(report.to_json())
    (out / "compare.csv").write_text(report.to_csv())
    print(f"compared {len(report.rows)} scenarios -> {out}")
    return EXIT_OK


def cmd_fit(args) -> int:
    result = fit_coefficients(read_telemetry_csv(args.telemetry))
    doc = {
        "coefficients": list(result.coeffs.beta),
        "residual_norm": result.residual_norm,
        "n_samples": result.n_samples,
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        (_out_dir(args) / "coefficients.json").write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    s = _scenario(args)
    alpha = validate(s)
    print(f"ok: alpha = {alpha:.6f}")
    return EXIT_OK


def cmd_gen(args) -> int:
    out = _out_dir(args)
    if args.demo:
        named = list(corpus.demo_cases().items())
    else:
        spec = corpus.CorpusSpec(args.sites, args.stations, args.preset or "3dr-solo")
        named = [
            (f"seed{args.seed}_{k:03d}", s)
            for k, s in enumerate(corpus.generate_corpus(args.seed, args.count, spec))
        ]
    for name, s in named:
        dump_scenario(s, out / f"{name}.json")
    print(f"wrote {len(named)} scenarios -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="droneplan", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_cmd(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        q = sub.add_parser(name, help=help)
        q.add_argument("--scenario", required=True, help="scenario JSON file")
        q.add_argument("--preset", choices=sorted(PRESETS), help="override the drone model")
        q.add_argument("--speed", type=float, help="fixed cruise speed in m/s")
        q.add_argument("--wind", type=_wind, help='wind domain "smin,smax,theta1,theta2" (m/s, deg)')
        q.set_defaults(func=fn)
        return q

    for name, fn, help in (
        ("plan", cmd_plan, "plan a tour with recharging"),
        ("benchmark", cmd_benchmark, "greedy nearest-site baseline"),
        ("exact", cmd_exact, "exact optimum for small scenarios"),
    ):
        q = scenario_cmd(name, fn, help)
        q.add_argument("--out", required=True, help="output directory")
        if name == "plan":
            q.add_argument("--no-local-search", dest="local_search", action="store_false",
                           help="skip the trip-time refinement of the repaired tour")
        if name == "exact":
            q.add_argument("--max-sites", type=int, default=ExactLimits.max_sites)
            q.add_argument("--max-stations", type=int, default=ExactLimits.max_stations)
    scenario_cmd("validate", cmd_validate, "check the scenario and print alpha")

    def corpus_args(q: argparse.ArgumentParser) -> None:
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--count", type=int, default=10)
        q.add_argument("--sites", type=int, default=5)
        q.add_argument("--stations", type=int, default=3)
        q.add_argument("--preset", choices=sorted(PRESETS))
        q.add_argument("--out", required=True, help="output directory")

    q = sub.add_parser("compare", help="planner vs benchmark vs exact")
    q.add_argument("--scenario", nargs="*", help="scenario files; omit to draw a corpus")
    q.add_argument("--jobs", type=int, default=1)
    corpus_args(q)
    q.set_defaults(func=cmd_compare)

    q = sub.add_parser("gen", help="write generated scenarios")
    q.add_argument("--demo", action="store_true", help="the eight demo cases instead")
    corpus_args(q)
    q.set_defaults(func=cmd_gen)

    q = sub.add_parser("fit", help="fit power coefficients to telemetry")
    q.add_argument("--telemetry", required=True, help="CSV with vx,vy,ax,ay,vz,az,mass_g,wx,wy,power_w")
    q.add_argument("--out", help="output directory (stdout if omitted)")
    q.set_defaults(func=cmd_fit)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_MALFORMED
    try:
        return args.func(args)
    except _INFEASIBLE as exc:
        print(f"droneplan: infeasible: {_one_line(exc)}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DronePlanError, ValueError, OSError) as exc:
        print(f"droneplan: error: {_one_line(exc)}", file=sys.stderr)
        return EXIT_MALFORMED


def _one_line(exc: BaseException) -> str:
    return " ".join(str(exc).split()) or type(exc).__name__


if __name__ == "__main__":
    sys.exit(main())
