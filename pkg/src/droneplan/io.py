"""Plan serialisation: JSON, per-stop SoC CSV, and an SVG map."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Mapping
from xml.sax.saxutils import escape

from .errors import MalformedPlanError
from .planner.plan import FlightPlan, PlanReport, make_plan
from .scenario import Scenario

SOC_COLUMNS = ("stop_index", "id", "soc_wh", "cum_time_s")


def plan_to_dict(s: Scenario, plan: FlightPlan, report: PlanReport | None = None) -> dict[str, Any]:
    kinds = {loc.id: loc.kind for loc in s.locations}
    return {
        "stops": [
            {"id": x, "kind": kinds[x], "soc_wh": soc, "charge_wh": b}
            for x, soc, b in zip(plan.stops, plan.soc_trace, plan.charges)
        ],
        "speed_mps": plan.speed,
        "totals": {
            "flight_s": plan.totals.flight_s,
            "charge_s": plan.totals.charge_s,
            "distance_m": plan.totals.distance_m,
            "energy_wh": plan.totals.energy_wh,
        },
        "flags": {
            "matching_exact": True if report is None else report.matching_exact,
            "ratio_vs_oracle": None if report is None else report.ratio_vs_oracle,
        },
    }


def plan_from_dict(s: Scenario, data: Mapping[str, Any]) -> FlightPlan:
    """Rebuild a plan from its JSON form; totals and SoC are recomputed."""
    try:
        stops = data["stops"]
        ids = [str(stop["id"]) for stop in stops]
        charges = [float(stop["charge_wh"]) for stop in stops]
        speed = float(data["speed_mps"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedPlanError(f"bad plan document: {exc}") from None
    unknown = [x for x in ids if x not in s.index]
    if unknown:
        raise MalformedPlanError(f"unknown location id {unknown[0]!r}")
    return make_plan(s, [s.index[x] for x in ids], charges, speed)


def dump_plan(path: str | Path, s: Scenario, plan: FlightPlan, report: PlanReport | None = None) -> None:
    Path(path).write_text(json.dumps(plan_to_dict(s, plan, report), indent=2) + "\n")


def load_plan(path: str | Path, s: Scenario) -> FlightPlan:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedPlanError(f"{path}: invalid JSON: {exc}") from None
    return plan_from_dict(s, data)


def arrival_times(s: Scenario, plan: FlightPlan) -> list[float]:
    """Elapsed time on arrival at each stop, counting earlier charging."""
    pos = [s.locations[s.index[x]] for x in plan.stops]
    t = 0.0
    out = [t]
    for k in range(len(pos) - 1):
        t += s.charge_seconds_per_wh * plan.charges[k]
        t += math.hypot(pos[k + 1].x - pos[k].x, pos[k + 1].y - pos[k].y) / plan.speed
        out.append(t)
    return out


def write_soc_csv(path: str | Path, s: Scenario, plan: FlightPlan) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SOC_COLUMNS)
        for k, (x, soc, t) in enumerate(zip(plan.stops, plan.soc_trace, arrival_times(s, plan))):
            w.writerow([k, x, f"{soc:.6f}", f"{t:.3f}"])


def _soc_colour(frac: float) -> str:
    """Red when empty, green when full."""
    frac = min(1.0, max(0.0, frac))
    return f"#{round(255 * (1 - frac)):02x}{round(200 * frac):02x}30"


def render_svg(s: Scenario, plan: FlightPlan, size: int = 800, margin: int = 40) -> str:
    """Map of the tour: sites as black dots, stations as blue squares, the base
    as a magenta triangle. Legs are numbered in flight order and coloured by
    the SoC at take-off."""
    xs = [loc.x for loc in s.locations]
    ys = [loc.y for loc in s.locations]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    scale = (size - 2 * margin) / span

    def px(x: float, y: float) -> tuple[float, float]:
        # y axis points up on the map
        return margin + (x - min(xs)) * scale, size - margin - (y - min(ys)) * scale

    bat = s.battery
    lo, hi = bat.b_min, bat.b_max
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    stops = [s.locations[s.index[x]] for x in plan.stops]
    for k in range(len(stops) - 1):
        a, b = stops[k], stops[k + 1]
        take_off = plan.soc_trace[k] + bat.eta_c * plan.charges[k]
        frac = (take_off - lo) / (hi - lo) if math.isfinite(hi) else 1.0
        (x1, y1), (x2, y2) = px(a.x, a.y), px(b.x, b.y)
        out.append(
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="{_soc_colour(frac)}" stroke-width="3"/>'
        )
        out.append(
            f'<text x="{(x1 + x2) / 2:.1f}" y="{(y1 + y2) / 2 - 4:.1f}" font-size="12" '
            f'text-anchor="middle">{k + 1}</text>'
        )
    for loc in s.locations:
        x, y = px(loc.x, loc.y)
        if loc.kind == "site":
            out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="5" fill="black"/>')
        elif loc.kind == "station":
            out.append(f'<rect x="{x - 6:.1f}" y="{y - 6:.1f}" width="12" height="12" fill="blue"/>')
        else:
            pts = f"{x:.1f},{y - 8:.1f} {x - 7:.1f},{y + 6:.1f} {x + 7:.1f},{y + 6:.1f}"
            out.append(f'<polygon points="{pts}" fill="magenta"/>')
        out.append(
            f'<text x="{x + 8:.1f}" y="{y + 14:.1f}" font-size="11" fill="#444">{escape(loc.id)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path: str | Path, s: Scenario, plan: FlightPlan) -> None:
    Path(path).write_text(render_svg(s, plan))
