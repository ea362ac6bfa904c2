"""End-to-end acceptance checks, one test per criterion."""

from __future__ import annotations

import itertools
import math
import statistics
import time

import numpy as np
import pytest

from droneplan.cli import main
from droneplan.corpus import CorpusSpec, generate_corpus, random_tsp, demo_cases, ladder_scenarios
from droneplan.errors import BenchmarkFailedError, CannotFixChargeError
from droneplan.model import PRESETS, MotionSample, estimate_power, fit_coefficients, synthesize_samples
from droneplan.planner import (
    Context,
    check_cost_bounds,
    check_feasibility,
    find_plan,
    fix_charge,
    plan_benchmark,
    plan_exact,
    plan_variable_speed,
)
from droneplan.planner.plan import full_recharge, make_plan
from droneplan.scenario import cost_matrix


@pytest.fixture(scope="module")
def ratio_corpus():
    """120 seeded scenarios with 1-5 sites and 1-3 stations."""
    out = []
    for n_sites, n_stations in itertools.product(range(1, 6), range(1, 4)):
        spec = CorpusSpec(n_sites=n_sites, n_stations=n_stations)
        out += generate_corpus(1000 + 10 * n_sites + n_stations, 8, spec)
    return out


@pytest.fixture(scope="module")
def ratio_runs(ratio_corpus):
    t0 = time.perf_counter()
    runs = [(s, *find_plan(s), plan_exact(s)) for s in ratio_corpus]
    return runs, time.perf_counter() - t0


def test_c01_hover_presets(verdict):
    hover = MotionSample()
    values = {name: estimate_power(PRESETS[name], hover) for name in PRESETS}
    timings = []
    for _ in range(200):
        t0 = time.perf_counter()
        estimate_power(PRESETS["3dr-solo"], hover)
        timings.append(time.perf_counter() - t0)
    median = statistics.median(timings)
    ok = values == {"3dr-solo": 433.9, "dji-matrice-100": 251.7} and median < 1e-3
    verdict(1, ok, f"hover {values}, median call {median * 1e6:.1f} us")
    assert ok


def test_c02_fit_recovers_presets(verdict):
    worst = 0.0
    t0 = time.perf_counter()
    for k, name in enumerate(sorted(PRESETS)):
        truth = PRESETS[name].as_array()
        fit = fit_coefficients(synthesize_samples(PRESETS[name], 50, np.random.default_rng(k)))
        worst = max(worst, float(np.max(np.abs(fit.coeffs.as_array() - truth) / np.abs(truth))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 1.0
    verdict(2, ok, f"max relative error {worst:.2e}, {elapsed:.3f} s")
    assert ok


def test_c03_ratio_against_oracle(ratio_runs, verdict):
    runs, elapsed = ratio_runs
    violations = []
    worst = 0.0
    for s, plan, report, exact in runs:
        ratio = report.modified_cost_wh / exact.opt_relaxed
        worst = max(worst, ratio)
        if report.modified_cost_wh > report.ratio_bound * exact.opt_relaxed * (1 + 1e-9):
            violations.append(ratio)
    ok = len(runs) >= 100 and not violations and elapsed < 300
    verdict(3, ok, f"{len(runs)} scenarios, {len(violations)} violations, "
                   f"worst ratio {worst:.3f}, {elapsed:.1f} s")
    assert ok


def test_c04_trip_time_bracket(ratio_runs, verdict):
    runs, _ = ratio_runs
    bad = 0
    for s, plan, _, _ in runs:
        b = check_cost_bounds(Context.build(s), plan)
        slack = 1e-9 * max(1.0, b.upper)
        bad += not (b.lower - slack <= plan.objective_s <= b.upper + slack)
    verdict(4, bad == 0, f"{len(runs)} plans, {bad} outside the bracket")
    assert bad == 0


def test_c05_charge_cap_and_minimality(ratio_runs, verdict):
    runs, _ = ratio_runs
    over = not_minimal = charged = 0
    for s, plan, report, _ in runs:
        over += plan.total_charge_wh > report.charge_cap_wh * (1 + 1e-9) + 1e-12
        positive = [k for k, b in enumerate(plan.charges) if b > 0]
        if not positive:
            continue
        charged += 1
        cut = list(plan.charges)
        cut[positive[-1]] -= 1e-6 * s.battery.b_max
        trimmed = make_plan(s, [s.index[x] for x in plan.stops], cut, plan.speed)
        not_minimal += check_feasibility(s, trimmed).ok
    ok = over == 0 and not_minimal == 0
    verdict(5, ok, f"{over} over the cap; {not_minimal} of {charged} charged plans survive a cut")
    assert ok


def test_c06_soc_window(ratio_corpus, verdict):
    checked = breaches = skipped = 0

    def check(s, plan):
        nonlocal checked, breaches
        checked += 1
        feas = check_feasibility(s, plan)
        bat = s.battery
        tol = 1e-9 * bat.b_max
        inside = all(bat.b_min - tol <= x <= bat.b_max + tol for x in feas.trace)
        breaches += not (feas.ok and inside and plan.soc_trace[0] == bat.b_max)

    for s in ratio_corpus:
        check(s, find_plan(s)[0])
        check(s, plan_variable_speed(s.with_speeds(4.0, 5.0, 6.0))[0])
        try:
            check(s, plan_benchmark(s)[0])
        except BenchmarkFailedError:
            skipped += 1
    verdict(6, breaches == 0, f"{checked} plans, {breaches} breaches, {skipped} benchmark dead ends")
    assert breaches == 0


def held_karp(d: np.ndarray) -> float:
    n = len(d)
    best = {(1 << j, j): d[0, j] for j in range(1, n)}
    for size in range(2, n):
        for subset in itertools.combinations(range(1, n), size):
            mask = sum(1 << j for j in subset)
            for j in subset:
                prev = mask ^ (1 << j)
                best[(mask, j)] = min(best[(prev, k)] + d[k, j] for k in subset if k != j)
    full = sum(1 << j for j in range(1, n))
    return min(best[(full, j)] + d[j, 0] for j in range(1, n))


def test_c07_unbounded_battery_tsp(verdict):
    rng = np.random.default_rng(77)
    worst = 0.0
    fails = 0
    t0 = time.perf_counter()
    for k in range(50):
        s = random_tsp(rng, 2 + k % 8)  # 2..9 sites
        plan, _ = find_plan(s, local_search=False)
        opt = held_karp(cost_matrix(s).d)
        ratio = plan.totals.distance_m / opt
        worst = max(worst, ratio)
        fails += ratio > 1.5 + 1e-9
    elapsed = time.perf_counter() - t0
    ok = fails == 0 and elapsed < 120
    verdict(7, ok, f"50 instances, worst tour/optimum {worst:.3f}, {elapsed:.1f} s")
    assert ok


def test_c08_demo_cases_beat_benchmark(verdict):
    rows = []
    for name, s in demo_cases().items():
        ours = find_plan(s)[0].objective_s
        theirs = plan_benchmark(s)[0].objective_s
        rows.append((name, ours, theirs))
    losses = [r[0] for r in rows if r[1] > r[2] + 1e-9]
    gains = ", ".join(f"{1 - o / t:.0%}" for _, o, t in rows)
    verdict(8, not losses, f"8 cases, savings vs benchmark: {gains}")
    assert not losses


def robust_objective(s, stops) -> float:
    """Least trip time of a fixed route under the scenario's worst-case wind."""
    ctx = Context.build(s)
    idx = [s.index[x] for x in stops]
    rough = make_plan(s, idx, full_recharge(s, ctx.cm, idx), ctx.speed)
    try:
        charges = fix_charge(ctx, rough)
    except CannotFixChargeError:
        return math.inf
    return make_plan(s, idx, charges, ctx.speed).objective_s


def test_c09_wind_ladder_monotone(verdict):
    ladder = ladder_scenarios()
    for lo, hi in zip(ladder, ladder[1:]):
        assert hi.wind.contains(lo.wind)
    stops = find_plan(ladder[0])[0].stops
    rates = [cost_matrix(s).c_f for s in ladder]
    objectives = [robust_objective(s, stops) for s in ladder]
    rate_ok = all(np.all(b >= a - 1e-12) for a, b in zip(rates, rates[1:]))
    obj_ok = all(b >= a - 1e-9 for a, b in zip(objectives, objectives[1:]))
    ok = rate_ok and obj_ok
    verdict(9, ok, "robust trip time per rung: " + ", ".join(f"{o:.0f} s" for o in objectives))
    assert ok


def test_c10_compare_is_reproducible(tmp_path, verdict):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["compare", "--seed", "5", "--count", "6", "--out", str(out)]) == 0
        outs.append(((out / "compare.json").read_bytes(), (out / "compare.csv").read_bytes()))
    ok = outs[0] == outs[1]
    verdict(10, ok, f"compare.json {len(outs[0][0])} bytes, compare.csv {len(outs[0][1])} bytes identical")
    assert ok
