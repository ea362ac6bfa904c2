"""Side-by-side runs of the planner, the greedy benchmark and the exact solver."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Sequence

from .errors import DronePlanError
from .planner import ExactLimits, find_plan, plan_benchmark, plan_exact


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    n_sites: int
    n_stations: int
    alpha: float
    plan_s: float | None
    benchmark_s: float | None
    exact_s: float | None
    dhat_wh: float | None
    opt_relaxed_wh: float | None
    ratio_bound: float | None
    ratio_vs_oracle: float | None
    note: str = ""


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]

    def to_json(self) -> str:
        return json.dumps({"rows": [asdict(r) for r in self.rows]}, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        names = [f.name for f in fields(ComparisonRow)]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names)
        for r in self.rows:
            w.writerow(["" if v is None else _fmt(v) for v in (getattr(r, n) for n in names)])
        return buf.getvalue()


def _fmt(v: object) -> str:
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def compare_one(name: str, s, limits: ExactLimits = ExactLimits()) -> ComparisonRow:
    notes = []
    plan_s = bench_s = exact_s = dhat = opt = bound = ratio = None
    alpha = math.nan
    try:
        plan, report = find_plan(s)
        plan_s, dhat, alpha, bound = (
            plan.objective_s, report.modified_cost_wh, report.alpha, report.ratio_bound
        )
    except DronePlanError as exc:
        notes.append(f"plan: {type(exc).__name__}")
    try:
        bench_s = plan_benchmark(s)[0].objective_s
    except DronePlanError as exc:
        notes.append(f"benchmark: {type(exc).__name__}")
    try:
        ex = plan_exact(s, limits)
        exact_s, opt = ex.objective_s, ex.opt_relaxed
        if dhat is not None and opt > 0:
            ratio = dhat / opt
    except DronePlanError as exc:
        notes.append(f"exact: {type(exc).__name__}")
    return ComparisonRow(
        name, len(s.sites), len(s.stations), alpha, plan_s, bench_s, exact_s,
        dhat, opt, bound, ratio, "; ".join(notes),
    )


def _compare_star(args):
    return compare_one(*args)


def compare_scenarios(
    named: Sequence[tuple[str, object]], limits: ExactLimits = ExactLimits(), jobs: int = 1
) -> ComparisonReport:
    """Rows come back in input order whatever the number of worker processes."""
    work = [(name, s, limits) for name, s in named]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_compare_star, work))
    else:
        rows = [compare_one(*w) for w in work]
    return ComparisonReport(tuple(rows))
