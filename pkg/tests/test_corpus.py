from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from droneplan.corpus import (
    CorpusSpec,
    demo_cases,
    generate_corpus,
    ladder_scenarios,
    wind_ladder,
)
from droneplan.errors import BenchmarkFailedError
from droneplan.planner import check_feasibility, find_plan, plan_benchmark
from droneplan.scenario import validate


def test_corpus_is_deterministic():
    spec = CorpusSpec(n_sites=4, n_stations=2)
    assert generate_corpus(9, 5, spec) == generate_corpus(9, 5, spec)
    assert generate_corpus(9, 5, spec) != generate_corpus(10, 5, spec)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 10**6),
    n_sites=st.integers(1, 8),
    n_stations=st.integers(1, 5),
    alpha=st.floats(0.2, 0.95),
    drone=st.sampled_from(["3dr-solo", "dji-matrice-100"]),
)
def test_generated_scenarios_plan_feasibly(seed, n_sites, n_stations, alpha, drone):
    spec = CorpusSpec(n_sites, n_stations, drone, alpha_max=alpha)
    (s,) = generate_corpus(seed, 1, spec)
    assert validate(s) < alpha
    plan, report = find_plan(s)
    assert check_feasibility(s, plan).ok
    assert report.alpha < alpha
    try:
        bench, _ = plan_benchmark(s)
    except BenchmarkFailedError:
        return
    assert check_feasibility(s, bench).ok


def test_demo_cases():
    cases = demo_cases()
    assert len(cases) == 8
    for s in cases.values():
        assert len(s.sites) == 4 and len(s.stations) == 4
        assert 0 < validate(s) < 1


def test_wind_ladder_is_nested():
    ladder = wind_ladder(4)
    for lo, hi in zip(ladder, ladder[1:]):
        assert hi.contains(lo) and not lo.contains(hi)
    assert ladder[-1].span == pytest.approx(2 * 3.141592653589793)
    assert [s.wind for s in ladder_scenarios()] == ladder
