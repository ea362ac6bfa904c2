"""Deterministic scenario generators: random corpora, demo cases and a wind ladder."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleSiteError
from .model import CHARGE_SECONDS_PER_WH, PRESETS, PowerCoefficients
from .scenario import (
    J_PER_WH,
    BatteryEnvelope,
    Location,
    Scenario,
    WindDomain,
    validate,
    worst_case_cf,
)

# Pack energy in Wh (capacity in Ah times nominal voltage).
PACK_WH = {"3dr-solo": 5.2 * 14.8, "dji-matrice-100": 5.7 * 22.8}
CRUISE_MPS = {"3dr-solo": 5.0, "dji-matrice-100": 5.0}
DEMO_ETA_C = 0.95
DEMO_ETA_D = 1.05
DEMO_RESERVE = 0.1  # b_min as a fraction of the pack
KMH = 1 / 3.6


def demo_battery(name: str) -> BatteryEnvelope:
    pack = PACK_WH[name]
    return BatteryEnvelope(DEMO_RESERVE * pack, pack, DEMO_ETA_C, DEMO_ETA_D)


def worst_rate_wh_per_m(
    coeffs: PowerCoefficients, speed: float, wind: WindDomain, mass: float, n_headings: int = 360
) -> float:
    """Largest worst-case cruise rate over a fan of headings, in Wh/m."""
    rates = (
        worst_case_cf(coeffs, speed, (math.cos(t), math.sin(t)), wind, mass)
        for t in np.linspace(0, 2 * math.pi, n_headings, endpoint=False)
    )
    return max(rates) / J_PER_WH


def range_m(s: Scenario, speed: float | None = None) -> float:
    """Distance one full charge covers in the worst heading and wind."""
    speed = s.speed_options[0] if speed is None else speed
    rate = worst_rate_wh_per_m(s.coeffs, speed, s.wind, s.payload_mass)
    return s.battery.usable_range / rate


@dataclass(frozen=True)
class CorpusSpec:
    n_sites: int = 5
    n_stations: int = 3
    drone: str = "3dr-solo"
    alpha_max: float = 0.8
    hop: float = 0.8  # station spacing as a fraction of the range
    wind: WindDomain = WindDomain()
    payload_g: float = 0.0


def _polar(rng: np.random.Generator, centre: tuple[float, float], r_max: float) -> tuple[float, float]:
    r = r_max * math.sqrt(rng.uniform())
    t = rng.uniform(0, 2 * math.pi)
    return centre[0] + r * math.cos(t), centre[1] + r * math.sin(t)


def random_scenario(rng: np.random.Generator, spec: CorpusSpec, max_tries: int = 200) -> Scenario:
    """One scenario whose sites all satisfy the alpha assumption.

    Stations form a chain with hops shorter than `hop` times the range; sites
    and the base sit inside alpha_max * range / 2 of a random station. Draws
    failing validation are redrawn from the same generator.
    """
    name = spec.drone
    speed = CRUISE_MPS[name]
    battery = demo_battery(name)
    coeffs = PRESETS[name]
    R = battery.usable_range / worst_rate_wh_per_m(coeffs, speed, spec.wind, spec.payload_g)
    for _ in range(max_tries):
        stations = [(0.0, 0.0)]
        while len(stations) < spec.n_stations:
            anchor = stations[int(rng.integers(len(stations)))]
            stations.append(_polar(rng, anchor, spec.hop * R))
        # the symmetrised cost graph can exceed the straight-line estimate, so aim inside
        reach = 0.95 * spec.alpha_max * R / 2
        sites = [_polar(rng, stations[int(rng.integers(len(stations)))], reach)
                 for _ in range(spec.n_sites)]
        base = _polar(rng, stations[int(rng.integers(len(stations)))], reach)
        locs = [Location("base", "base", *base)]
        locs += [Location(f"s{k}", "site", *p) for k, p in enumerate(sites)]
        locs += [Location(f"c{k}", "station", *p) for k, p in enumerate(stations)]
        s = Scenario(
            locations=tuple(locs),
            battery=battery,
            coeffs=coeffs,
            charge_seconds_per_wh=CHARGE_SECONDS_PER_WH[name],
            payload_mass=spec.payload_g,
            wind=spec.wind,
            speed_options=(speed,),
        )
        try:
            alpha = validate(s)
        except InfeasibleSiteError:
            continue
        if alpha < spec.alpha_max:
            return s
    raise RuntimeError("could not draw a scenario meeting the alpha assumption")


def generate_corpus(seed: int, count: int, spec: CorpusSpec = CorpusSpec()) -> list[Scenario]:
    """`count` scenarios drawn deterministically from `seed`."""
    rng = np.random.default_rng(seed)
    return [random_scenario(rng, spec) for _ in range(count)]


def random_tsp(rng: np.random.Generator, n_sites: int, side: float = 2000.0) -> Scenario:
    """Sites and base scattered in a square, no stations, unbounded battery."""
    pts = rng.uniform(0, side, size=(n_sites + 1, 2))
    locs = [Location("base", "base", *pts[0])]
    locs += [Location(f"s{k}", "site", *p) for k, p in enumerate(pts[1:])]
    return Scenario(
        locations=tuple(locs),
        battery=BatteryEnvelope(0.0, math.inf),
        coeffs=PRESETS["3dr-solo"],
        charge_seconds_per_wh=CHARGE_SECONDS_PER_WH["3dr-solo"],
        speed_options=(5.0,),
    )


# Demo layout in units of the scaling range: four stations on a loop, a site
# near each, the base beside the first station.
_DEMO_STATIONS = ((0.0, 0.0), (0.7, 0.0), (0.7, 0.7), (0.0, 0.7))
_DEMO_SITES = ((0.3, -0.15), (0.95, 0.25), (0.45, 0.9), (-0.2, 0.4))
_DEMO_BASE = (-0.1, -0.1)

# Wind orientations: the direction the air moves toward, counter-clockwise
# from east. A south wind blows north; a north-east wind blows south-west.
SOUTH_WIND = 90.0
NORTH_EAST_WIND = 225.0
DEMO_WIND_KMH = 20.0

# (drone, pack Wh, wind orientation deg, payload g)
DEMO_TABLE = (
    ("3dr-solo", 70.0, SOUTH_WIND, 0.0),
    ("3dr-solo", 70.0, NORTH_EAST_WIND, 0.0),
    ("3dr-solo", 140.0, SOUTH_WIND, 500.0),
    ("3dr-solo", 140.0, NORTH_EAST_WIND, 500.0),
    ("dji-matrice-100", 130.0, SOUTH_WIND, 0.0),
    ("dji-matrice-100", 130.0, NORTH_EAST_WIND, 0.0),
    ("dji-matrice-100", 260.0, SOUTH_WIND, 600.0),
    ("dji-matrice-100", 260.0, NORTH_EAST_WIND, 600.0),
)


def demo_layout(R: float) -> tuple[Location, ...]:
    locs = [Location("base", "base", _DEMO_BASE[0] * R, _DEMO_BASE[1] * R)]
    locs += [Location(f"s{k}", "site", x * R, y * R) for k, (x, y) in enumerate(_DEMO_SITES)]
    locs += [Location(f"c{k}", "station", x * R, y * R) for k, (x, y) in enumerate(_DEMO_STATIONS)]
    return tuple(locs)


def _demo_scenario(locs, drone: str, pack: float, theta: float, payload: float, wind_kmh: float):
    return Scenario(
        locations=locs,
        battery=BatteryEnvelope(DEMO_RESERVE * pack, pack, DEMO_ETA_C, DEMO_ETA_D),
        coeffs=PRESETS[drone],
        charge_seconds_per_wh=CHARGE_SECONDS_PER_WH[drone],
        payload_mass=payload,
        wind=WindDomain.fixed(wind_kmh * KMH, math.radians(theta)),
        speed_options=(CRUISE_MPS[drone],),
    )


def demo_cases() -> dict[str, Scenario]:
    """Eight demo cases on one map: two drones, one or two packs, south or
    north-east 20 km/h wind. The second pack is carried as payload.

    The map is scaled to the range of the one-pack Solo under the strongest
    wind of the ladder below, so every case and every rung stays valid.
    """
    probe = _demo_scenario(
        (Location("base", "base", 0, 0),), "3dr-solo", 70.0, 0.0, 0.0, LADDER_MAX_KMH
    )
    locs = demo_layout(range_m(probe.with_wind(WindDomain(0, LADDER_MAX_KMH * KMH, 0, 2 * math.pi))))
    return {
        f"case{k + 1}_{drone}_{int(pack)}wh_{'south' if theta == SOUTH_WIND else 'northeast'}_{int(m)}g":
            _demo_scenario(locs, drone, pack, theta, m, DEMO_WIND_KMH)
        for k, (drone, pack, theta, m) in enumerate(DEMO_TABLE)
    }


LADDER_MAX_KMH = 21.0


def wind_ladder(steps: int = 4, max_kmh: float = LADDER_MAX_KMH) -> list[WindDomain]:
    """Nested wind domains around half of `max_kmh`, centred on east.

    The first rung spans +-max/14 in speed and +-180/steps degrees; each
    rung widens both by the same step, ending at [0, max_kmh] over every
    orientation. With the defaults: 9-12 km/h over +-45 deg up to 0-21 km/h.
    """
    mid = max_kmh / 2
    first = max_kmh / 14
    out = []
    for k in range(steps):
        frac = k / (steps - 1) if steps > 1 else 1.0
        half_speed = first + (mid - first) * frac
        half_arc = math.pi * (k + 1) / steps
        out.append(
            WindDomain((mid - half_speed) * KMH, (mid + half_speed) * KMH, -half_arc, half_arc)
        )
    return out


def ladder_scenarios(base: Scenario | None = None, steps: int = 4) -> list[Scenario]:
    """A scenario under each rung of the widening wind ladder."""
    if base is None:
        base = next(iter(demo_cases().values()))
    return [base.with_wind(w) for w in wind_ladder(steps)]
