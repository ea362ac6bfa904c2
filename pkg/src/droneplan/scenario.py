"""Mission world model and per-edge cost structure.

Positions live in a local planar frame in metres. Wind directions are the
direction the air moves *towards*, measured counter-clockwise from +x (east),
so a wind blowing from the south has orientation 90 degrees.

Energy bookkeeping is in Wh; the power model works in joules, converted once
here (``/ 3600``).
"""

from __future__ import annotations

import dataclasses
import functools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import graphkit
from .errors import InfeasibleSiteError, ScenarioFormatError
from .model import (
    CHARGE_SECONDS_PER_WH,
    PRESETS,
    CruiseState,
    PowerCoefficients,
    cruise_energy_rate,
)

J_PER_WH = 3600.0
KINDS = ("site", "station", "base")
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class Location:
    id: str
    kind: str
    x: float
    y: float

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ScenarioFormatError(f"location {self.id!r}: unknown kind {self.kind!r}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ScenarioFormatError(f"location {self.id!r}: non-finite position")


@dataclass(frozen=True)
class BatteryEnvelope:
    """SoC window in Wh. The initial SoC is always the upper bound."""

    b_min: float
    b_max: float
    eta_c: float = 1.0
    eta_d: float = 1.0

    def __post_init__(self) -> None:
        if not 0 <= self.b_min < self.b_max:
            raise ScenarioFormatError("battery requires 0 <= b_min < b_max")
        if not 0 < self.eta_c <= 1 <= self.eta_d or not math.isfinite(self.eta_d):
            raise ScenarioFormatError("battery requires 0 < eta_c <= 1 <= eta_d")

    @property
    def x0(self) -> float:
        return self.b_max

    @property
    def usable_range(self) -> float:
        """U: the most path energy one full charge can cover."""
        return (self.b_max - self.b_min) / self.eta_d


@dataclass(frozen=True)
class CostConstants:
    c_a: float  # s per metre
    c_b: float  # s per Wh commanded

    def __post_init__(self) -> None:
        if not (self.c_a > 0 and self.c_b > 0):
            raise ScenarioFormatError("cost constants must be positive")


@dataclass(frozen=True)
class WindDomain:
    """Box of wind speeds and orientations (radians, may wrap past 2*pi)."""

    speed_min: float = 0.0
    speed_max: float = 0.0
    theta_min: float = 0.0
    theta_max: float = 0.0

    def __post_init__(self) -> None:
        if not 0 <= self.speed_min <= self.speed_max:
            raise ScenarioFormatError("wind requires 0 <= speed_min <= speed_max")
        if not (math.isfinite(self.theta_min) and math.isfinite(self.theta_max)):
            raise ScenarioFormatError("wind orientation must be finite")
        if self.theta_max - self.theta_min > TWO_PI + 1e-12:
            raise ScenarioFormatError("wind orientation interval wider than 2*pi")

    @classmethod
    def fixed(cls, speed: float, theta: float) -> WindDomain:
        return cls(speed, speed, theta, theta)

    @classmethod
    def from_degrees(cls, smin: float, smax: float, t1: float, t2: float) -> WindDomain:
        return cls(smin, smax, math.radians(t1), math.radians(t2))

    @property
    def span(self) -> float:
        width = self.theta_max - self.theta_min
        if width < 0:
            width += TWO_PI
        return min(width, TWO_PI)

    def contains_angle(self, phi: float) -> bool:
        return (phi - self.theta_min) % TWO_PI <= self.span + 1e-12 or self.span >= TWO_PI

    def contains(self, other: WindDomain) -> bool:
        """Whether `other` is a subset of this domain."""
        if not (self.speed_min <= other.speed_min and other.speed_max <= self.speed_max):
            return False
        if self.span >= TWO_PI:
            return True
        offset = (other.theta_min - self.theta_min) % TWO_PI
        return offset + other.span <= self.span + 1e-12

    def vector(self, speed: float, theta: float) -> tuple[float, float]:
        return (speed * math.cos(theta), speed * math.sin(theta))


@dataclass(frozen=True)
class Scenario:
    locations: tuple[Location, ...]
    battery: BatteryEnvelope
    coeffs: PowerCoefficients
    charge_seconds_per_wh: float
    payload_mass: float = 0.0
    wind: WindDomain = field(default_factory=WindDomain)
    speed_options: tuple[float, ...] = (5.0,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "locations", tuple(self.locations))
        object.__setattr__(self, "speed_options", tuple(float(v) for v in self.speed_options))
        ids = [loc.id for loc in self.locations]
        if len(set(ids)) != len(ids):
            raise ScenarioFormatError("location ids must be unique")
        n_base = sum(loc.kind == "base" for loc in self.locations)
        if n_base != 1:
            raise ScenarioFormatError(f"exactly one base required, found {n_base}")
        if not self.speed_options or any(not v > 0 for v in self.speed_options):
            raise ScenarioFormatError("speed options must be a non-empty list of positive speeds")
        if list(self.speed_options) != sorted(self.speed_options):
            raise ScenarioFormatError("speed options must be ascending")
        if not self.payload_mass >= 0:
            raise ScenarioFormatError("payload mass must be non-negative")
        if not self.charge_seconds_per_wh > 0:
            raise ScenarioFormatError("charge_seconds_per_wh must be positive")

    @functools.cached_property
    def index(self) -> dict[str, int]:
        return {loc.id: i for i, loc in enumerate(self.locations)}

    @property
    def base(self) -> int:
        return next(i for i, loc in enumerate(self.locations) if loc.kind == "base")

    @property
    def sites(self) -> list[int]:
        return [i for i, loc in enumerate(self.locations) if loc.kind == "site"]

    @property
    def stations(self) -> list[int]:
        return [i for i, loc in enumerate(self.locations) if loc.kind == "station"]

    def is_station(self, i: int) -> bool:
        return self.locations[i].kind == "station"

    def costs(self, speed: float) -> CostConstants:
        return CostConstants(1.0 / speed, self.charge_seconds_per_wh)

    def with_speeds(self, *speeds: float) -> Scenario:
        return _replace(self, speed_options=tuple(speeds))

    def with_wind(self, wind: WindDomain) -> Scenario:
        return _replace(self, wind=wind)

    def with_battery(self, battery: BatteryEnvelope) -> Scenario:
        return _replace(self, battery=battery)


def _replace(s: Scenario, **changes: Any) -> Scenario:
    return dataclasses.replace(s, **changes)


# ---------------------------------------------------------------------------
# edge costs


def _cos_extremes(heading_angle: float, wind: WindDomain) -> tuple[float, float]:
    """Orientations in the wind interval maximising / minimising cos(theta - heading)."""
    if wind.contains_angle(heading_angle):
        t_hi = heading_angle
    else:
        ends = (wind.theta_min, wind.theta_min + wind.span)
        t_hi = max(ends, key=lambda t: math.cos(t - heading_angle))
    opposite = heading_angle + math.pi
    if wind.contains_angle(opposite):
        t_lo = opposite
    else:
        ends = (wind.theta_min, wind.theta_min + wind.span)
        t_lo = min(ends, key=lambda t: math.cos(t - heading_angle))
    return t_hi, t_lo


def worst_case_wind(
    coeffs: PowerCoefficients, heading: tuple[float, float], wind: WindDomain
) -> tuple[float, float]:
    """Wind vector in `wind` that maximises the cruise rate along `heading`.

    The rate depends on the wind only through b8 * |w| * cos(theta - heading),
    which is bilinear in (|w|, cos), so the maximum sits on a corner of
    [speed_min, speed_max] x [min cos, max cos].
    """
    b8 = coeffs.beta[7]
    h = math.atan2(heading[1], heading[0])
    t_hi, t_lo = _cos_extremes(h, wind)
    best = None
    for speed in (wind.speed_max, wind.speed_min):
        for theta in (t_hi, t_lo):
            value = b8 * speed * math.cos(theta - h)
            if best is None or value > best[0] + 1e-15:
                best = (value, speed, theta)
    _, speed, theta = best
    return wind.vector(speed, theta)


def worst_case_cf(
    coeffs: PowerCoefficients,
    speed: float,
    heading: tuple[float, float],
    wind: WindDomain,
    mass: float,
) -> float:
    """max over w in `wind` of the cruise energy rate (J/m), computed analytically."""
    w = worst_case_wind(coeffs, heading, wind)
    return cruise_energy_rate(coeffs, CruiseState(speed, heading, w, mass))


@dataclass(frozen=True)
class EdgeCost:
    d: float  # m
    tau: float  # s
    c_f: float  # J/m
    energy: float  # Wh


def edge_cost(s: Scenario, u: Location, v: Location, speed: float) -> EdgeCost:
    """Distance, time, worst-case rate and energy of the straight flight u -> v.

    A zero-length pair costs nothing and reports c_f = 0.
    """
    dx, dy = v.x - u.x, v.y - u.y
    d = math.hypot(dx, dy)
    if d == 0.0:
        return EdgeCost(0.0, 0.0, 0.0, 0.0)
    heading = (dx / d, dy / d)
    cf = worst_case_cf(s.coeffs, speed, heading, s.wind, s.payload_mass)
    return EdgeCost(d, d / speed, cf, cf * d / J_PER_WH)


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Directed per-pair costs at one cruise speed.

    ``weight`` is the symmetrised energy max(c_f(u,v), c_f(v,u)) * d in Wh, the
    edge length of the undirected graph the planner works on.
    """

    speed: float
    d: np.ndarray
    c_f: np.ndarray
    tau: np.ndarray
    energy: np.ndarray
    weight: np.ndarray
    c_f_lo: float
    c_f_hi: float

    @property
    def n(self) -> int:
        return self.d.shape[0]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@functools.lru_cache(maxsize=256)
def cost_matrix(s: Scenario, speed: float | None = None) -> CostMatrix:
    speed = s.speed_options[0] if speed is None else float(speed)
    n = len(s.locations)
    d = np.zeros((n, n))
    cf = np.zeros((n, n))
    for i, u in enumerate(s.locations):
        for j, v in enumerate(s.locations):
            if i != j:
                e = edge_cost(s, u, v, speed)
                d[i, j] = e.d
                cf[i, j] = e.c_f
    moving = d > 0
    if moving.any():
        lo, hi = float(cf[moving].min()), float(cf[moving].max())
    else:
        lo = hi = worst_case_cf(s.coeffs, speed, (1.0, 0.0), s.wind, s.payload_mass)
    cf[~moving] = hi  # zero-length pairs carry no energy; keep them inside [lo, hi]
    energy = cf * d / J_PER_WH
    weight = np.maximum(energy, energy.T)
    return CostMatrix(
        speed=speed,
        d=_frozen(d),
        c_f=_frozen(cf),
        tau=_frozen(d / speed),
        energy=_frozen(energy),
        weight=_frozen(weight),
        c_f_lo=lo,
        c_f_hi=hi,
    )


@functools.lru_cache(maxsize=256)
def modified_distances(s: Scenario, speed: float | None = None) -> graphkit.PathTable:
    """All-pairs shortest energy distances over the symmetrised cost graph."""
    return graphkit.all_pairs_shortest(cost_matrix(s, speed).weight)


def nearest_stations(s: Scenario, table: graphkit.PathTable) -> tuple[np.ndarray, list[int | None]]:
    """Per vertex: modified distance to, and index of, the nearest station.

    Without stations every distance is 0 and every station is None.
    """
    n = len(s.locations)
    stations = s.stations
    if not stations:
        return np.zeros(n), [None] * n
    dist = np.empty(n)
    near: list[int | None] = []
    for u in range(n):
        best = min(stations, key=lambda z: (table.dist[u, z], z))
        dist[u] = table.dist[u, best]
        near.append(best)
    return dist, near


def validate(s: Scenario, speed: float | None = None) -> float:
    """Smallest alpha with every site within alpha * U / 2 of a station.

    The base must also lie within U / 2 of a station, otherwise the drone could
    not be routed back through a charger. Without stations the battery must be
    unbounded (U infinite) and alpha is 0.
    """
    U = s.battery.usable_range
    stations = s.stations
    if not stations:
        if math.isinf(U):
            return 0.0
        first = (s.sites or [s.base])[0]
        raise InfeasibleSiteError(s.locations[first].id, math.inf, U / 2)
    table = modified_distances(s, speed)
    dist, _ = nearest_stations(s, table)
    limit = U / 2
    alpha = 0.0
    for u in s.sites:
        if not dist[u] < limit:
            raise InfeasibleSiteError(s.locations[u].id, float(dist[u]), limit)
        alpha = max(alpha, float(dist[u] / limit))
    if dist[s.base] > limit:
        raise InfeasibleSiteError(s.locations[s.base].id, float(dist[s.base]), limit)
    return alpha


# ---------------------------------------------------------------------------
# JSON


_TOP_KEYS = {"locations", "battery", "drone", "wind", "speeds_mps", "charge_seconds_per_wh"}
_LOC_KEYS = {"id", "kind", "x_m", "y_m"}
_BATTERY_KEYS = {"b_min_wh", "b_max_wh", "eta_c", "eta_d"}
_DRONE_KEYS = {"preset", "coefficients", "payload_g"}
_WIND_KEYS = {"speed_min", "speed_max", "theta_min_deg", "theta_max_deg"}


def _check_keys(obj: Any, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(obj, Mapping):
        raise ScenarioFormatError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioFormatError(f"{where}: unknown fields {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ScenarioFormatError(f"{where}: missing fields {sorted(missing)}")


def _num(obj: Mapping, key: str, where: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFormatError(f"{where}.{key}: expected a number")
    return float(value)


def scenario_from_dict(data: Mapping[str, Any]) -> Scenario:
    _check_keys(data, _TOP_KEYS, _TOP_KEYS - {"charge_seconds_per_wh", "wind"}, "scenario")
    locs = data["locations"]
    if not isinstance(locs, list):
        raise ScenarioFormatError("scenario.locations: expected a list")
    locations = []
    for k, raw in enumerate(locs):
        where = f"locations[{k}]"
        _check_keys(raw, _LOC_KEYS, _LOC_KEYS, where)
        if not isinstance(raw["id"], str) or not isinstance(raw["kind"], str):
            raise ScenarioFormatError(f"{where}: id and kind must be strings")
        locations.append(
            Location(raw["id"], raw["kind"], _num(raw, "x_m", where), _num(raw, "y_m", where))
        )

    b = data["battery"]
    _check_keys(b, _BATTERY_KEYS, {"b_min_wh", "b_max_wh"}, "battery")
    battery = BatteryEnvelope(
        _num(b, "b_min_wh", "battery"),
        _num(b, "b_max_wh", "battery"),
        _num(b, "eta_c", "battery") if "eta_c" in b else 1.0,
        _num(b, "eta_d", "battery") if "eta_d" in b else 1.0,
    )

    drone = data["drone"]
    _check_keys(drone, _DRONE_KEYS, set(), "drone")
    if ("preset" in drone) == ("coefficients" in drone):
        raise ScenarioFormatError("drone: give exactly one of preset or coefficients")
    if "preset" in drone:
        name = drone["preset"]
        if name not in PRESETS:
            raise ScenarioFormatError(f"drone.preset: unknown preset {name!r}")
        coeffs = PRESETS[name]
        default_cb = CHARGE_SECONDS_PER_WH[name]
    else:
        raw = drone["coefficients"]
        if not isinstance(raw, list) or len(raw) != 9:
            raise ScenarioFormatError("drone.coefficients: expected a list of 9 numbers")
        try:
            coeffs = PowerCoefficients(tuple(float(x) for x in raw))
        except (TypeError, ValueError) as exc:
            raise ScenarioFormatError(f"drone.coefficients: {exc}") from None
        default_cb = None
    payload = _num(drone, "payload_g", "drone") if "payload_g" in drone else 0.0

    if "charge_seconds_per_wh" in data:
        c_b = _num(data, "charge_seconds_per_wh", "scenario")
    elif default_cb is not None:
        c_b = default_cb
    else:
        raise ScenarioFormatError("charge_seconds_per_wh is required with custom coefficients")

    wind = WindDomain()
    if "wind" in data:
        w = data["wind"]
        _check_keys(w, _WIND_KEYS, _WIND_KEYS, "wind")
        wind = WindDomain.from_degrees(
            _num(w, "speed_min", "wind"),
            _num(w, "speed_max", "wind"),
            _num(w, "theta_min_deg", "wind"),
            _num(w, "theta_max_deg", "wind"),
        )

    speeds = data["speeds_mps"]
    if not isinstance(speeds, list) or not speeds:
        raise ScenarioFormatError("speeds_mps: expected a non-empty list")
    return Scenario(
        locations=tuple(locations),
        battery=battery,
        coeffs=coeffs,
        charge_seconds_per_wh=c_b,
        payload_mass=payload,
        wind=wind,
        speed_options=tuple(_num({"v": v}, "v", "speeds_mps") for v in speeds),
    )


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    preset_name = next((k for k, v in PRESETS.items() if v == s.coeffs), None)
    drone: dict[str, Any] = (
        {"preset": preset_name} if preset_name else {"coefficients": list(s.coeffs.beta)}
    )
    drone["payload_g"] = s.payload_mass
    return {
        "locations": [
            {"id": loc.id, "kind": loc.kind, "x_m": loc.x, "y_m": loc.y} for loc in s.locations
        ],
        "battery": {
            "b_min_wh": s.battery.b_min,
            "b_max_wh": s.battery.b_max,
            "eta_c": s.battery.eta_c,
            "eta_d": s.battery.eta_d,
        },
        "drone": drone,
        "wind": {
            "speed_min": s.wind.speed_min,
            "speed_max": s.wind.speed_max,
            "theta_min_deg": math.degrees(s.wind.theta_min),
            "theta_max_deg": math.degrees(s.wind.theta_max),
        },
        "speeds_mps": list(s.speed_options),
        "charge_seconds_per_wh": s.charge_seconds_per_wh,
    }


def load_scenario(path: str | Path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: invalid JSON: {exc}") from None
    return scenario_from_dict(data)


def dump_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2, sort_keys=True) + "\n")
