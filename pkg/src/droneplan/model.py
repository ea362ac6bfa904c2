"""Blackbox power-consumption model for multirotor drones.

Battery power is a linear function of nine motion features::

    P = b1*|v_xy| + b2*|a_xy| + b3*|v_xy||a_xy|
      + b4*|v_z|  + b5*|a_z|  + b6*|v_z||a_z|
      + b7*m + b8*(v_xy . w_xy) + b9

with speeds in m/s, accelerations in m/s^2, payload in grams and power in
watts. Two calibrated coefficient sets ship as presets.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateDesignError,
    InsufficientDataError,
    InvalidDurationError,
    InvalidSampleError,
    NonPhysicalRateError,
)

FEATURE_NAMES = (
    "v_xy",
    "a_xy",
    "v_xy*a_xy",
    "v_z",
    "a_z",
    "v_z*a_z",
    "mass",
    "v_xy.w_xy",
    "const",
)
N_FEATURES = len(FEATURE_NAMES)

TELEMETRY_COLUMNS = ("vx", "vy", "ax", "ay", "vz", "az", "mass_g", "wx", "wy", "power_w")


@dataclass(frozen=True)
class PowerCoefficients:
    beta: tuple[float, ...]

    def __post_init__(self) -> None:
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != N_FEATURES:
            raise ValueError(f"expected {N_FEATURES} coefficients, got {len(beta)}")
        if not all(math.isfinite(b) for b in beta):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "beta", beta)

    def as_array(self) -> np.ndarray:
        return np.array(self.beta, dtype=float)


PRESETS: dict[str, PowerCoefficients] = {
    "3dr-solo": PowerCoefficients(
        (-1.526, 3.934, 0.968, 18.125, 96.613, -1.085, 0.220, 1.332, 433.9)
    ),
    "dji-matrice-100": PowerCoefficients(
        (-2.595, 0.116, 0.824, 18.321, 31.745, 13.282, 0.197, 1.43, 251.7)
    ),
}

# Charging seconds per Wh: rated charge duration over pack energy (Ah * V).
CHARGE_SECONDS_PER_WH: dict[str, float] = {
    "3dr-solo": 90 * 60 / (5.2 * 14.8),
    "dji-matrice-100": 180 * 60 / (5.7 * 22.8),
}


def preset(name: str) -> PowerCoefficients:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class MotionSample:
    v_xy: tuple[float, float] = (0.0, 0.0)
    a_xy: tuple[float, float] = (0.0, 0.0)
    v_z: float = 0.0
    a_z: float = 0.0
    payload_mass: float = 0.0
    wind_xy: tuple[float, float] = (0.0, 0.0)
    measured_power: float | None = None


@dataclass(frozen=True)
class CruiseState:
    """Level flight at constant speed along a unit heading."""

    speed: float
    heading: tuple[float, float]
    wind_xy: tuple[float, float] = (0.0, 0.0)
    payload_mass: float = 0.0

    def __post_init__(self) -> None:
        if not self.speed > 0:
            raise ValueError("cruise speed must be positive")
        if abs(math.hypot(*self.heading) - 1.0) > 1e-9:
            raise ValueError("heading must be a unit vector")


def features(s: MotionSample) -> np.ndarray:
    values = (*s.v_xy, *s.a_xy, s.v_z, s.a_z, s.payload_mass, *s.wind_xy)
    if not all(math.isfinite(x) for x in values):
        raise InvalidSampleError(f"non-finite motion sample: {s}")
    if s.payload_mass < 0:
        raise InvalidSampleError("payload mass must be non-negative")
    v = math.hypot(*s.v_xy)
    a = math.hypot(*s.a_xy)
    vz = abs(s.v_z)
    az = abs(s.a_z)
    dot = s.v_xy[0] * s.wind_xy[0] + s.v_xy[1] * s.wind_xy[1]
    return np.array([v, a, v * a, vz, az, vz * az, s.payload_mass, dot, 1.0])


def power_from_features(coeffs: PowerCoefficients, phi: Sequence[float]) -> float:
    """Evaluate the model directly on a feature vector (no magnitudes taken)."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (N_FEATURES,):
        raise InvalidSampleError(f"feature vector must have shape ({N_FEATURES},)")
    return float(math.fsum(b * x for b, x in zip(coeffs.beta, phi)))


def estimate_power(coeffs: PowerCoefficients, s: MotionSample) -> float:
    """Estimated battery power in watts."""
    return power_from_features(coeffs, features(s))


def estimate_energy(coeffs: PowerCoefficients, s: MotionSample, duration: float) -> float:
    """Energy in joules for holding motion state `s` over `duration` seconds."""
    if not math.isfinite(duration) or duration < 0:
        raise InvalidDurationError(f"duration must be finite and >= 0, got {duration}")
    return estimate_power(coeffs, s) * duration


def cruise_energy_rate(coeffs: PowerCoefficients, c: CruiseState) -> float:
    """Energy per metre (J/m) of level cruise; raises if the model gives <= 0."""
    hx, hy = c.heading
    sample = MotionSample(
        v_xy=(c.speed * hx, c.speed * hy),
        wind_xy=c.wind_xy,
        payload_mass=c.payload_mass,
    )
    rate = estimate_power(coeffs, sample) / c.speed
    if not rate > 0:
        raise NonPhysicalRateError(
            f"cruise energy rate {rate:.6g} J/m at speed {c.speed} m/s is not positive"
        )
    return rate


@dataclass(frozen=True)
class FitResult:
    coeffs: PowerCoefficients
    residual_norm: float
    n_samples: int


def _dependent_columns(X: np.ndarray) -> list[str]:
    kept: list[int] = []
    dependent: list[str] = []
    for j in range(X.shape[1]):
        trial = kept + [j]
        if np.linalg.matrix_rank(X[:, trial]) == len(trial):
            kept.append(j)
        else:
            dependent.append(FEATURE_NAMES[j])
    return dependent


def fit_coefficients(samples: Iterable[MotionSample]) -> FitResult:
    """Ordinary least squares fit of the nine coefficients.

    Solved through an SVD-based solver rather than the normal equations, since
    flight features are strongly correlated (speed and speed*acceleration).
    """
    samples = list(samples)
    if len(samples) < N_FEATURES:
        raise InsufficientDataError(N_FEATURES, len(samples))
    if any(s.measured_power is None for s in samples):
        raise InvalidSampleError("every fitting sample needs measured_power")
    X = np.vstack([features(s) for s in samples])
    y = np.array([float(s.measured_power) for s in samples])
    if not np.all(np.isfinite(y)):
        raise InvalidSampleError("measured power must be finite")

    # column scaling keeps the rank test meaningful when units differ widely
    scale = np.linalg.norm(X, axis=0)
    scale[scale == 0] = 1.0
    Xs = X / scale
    if np.linalg.matrix_rank(Xs) < N_FEATURES:
        raise DegenerateDesignError(_dependent_columns(Xs))
    sol, *_ = np.linalg.lstsq(Xs, y, rcond=None)
    beta = sol / scale
    residual = float(np.linalg.norm(X @ beta - y))
    return FitResult(PowerCoefficients(tuple(beta)), residual, len(samples))


def synthesize_samples(
    coeffs: PowerCoefficients,
    n: int,
    rng: np.random.Generator,
    noise_std: float = 0.0,
) -> list[MotionSample]:
    """Random motion states labelled with model power plus Gaussian noise."""
    out = []
    for _ in range(n):
        th_v, th_a, th_w = rng.uniform(0, 2 * math.pi, size=3)
        v = rng.uniform(0, 15)
        a = rng.uniform(0, 4)
        w = rng.uniform(0, 8)
        s = MotionSample(
            v_xy=(v * math.cos(th_v), v * math.sin(th_v)),
            a_xy=(a * math.cos(th_a), a * math.sin(th_a)),
            v_z=float(rng.uniform(0, 4)),
            a_z=float(rng.uniform(0, 3)),
            payload_mass=float(rng.uniform(0, 600)),
            wind_xy=(w * math.cos(th_w), w * math.sin(th_w)),
        )
        p = estimate_power(coeffs, s)
        if noise_std:
            p += float(rng.normal(0.0, noise_std))
        out.append(
            MotionSample(s.v_xy, s.a_xy, s.v_z, s.a_z, s.payload_mass, s.wind_xy, p)
        )
    return out


def read_telemetry_csv(path: str | Path) -> list[MotionSample]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(TELEMETRY_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise InvalidSampleError(f"telemetry CSV missing columns: {sorted(missing)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                r = {k: float(row[k]) for k in TELEMETRY_COLUMNS}
            except ValueError as exc:
                raise InvalidSampleError(f"line {lineno}: {exc}") from None
            rows.append(
                MotionSample(
                    v_xy=(r["vx"], r["vy"]),
                    a_xy=(r["ax"], r["ay"]),
                    v_z=r["vz"],
                    a_z=r["az"],
                    payload_mass=r["mass_g"],
                    wind_xy=(r["wx"], r["wy"]),
                    measured_power=r["power_w"],
                )
            )
    return rows


def write_telemetry_csv(path: str | Path, samples: Iterable[MotionSample]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TELEMETRY_COLUMNS)
        for s in samples:
            w.writerow(
                [
                    repr(float(x))
                    for x in (
                        *s.v_xy,
                        *s.a_xy,
                        s.v_z,
                        s.a_z,
                        s.payload_mass,
                        *s.wind_xy,
                        s.measured_power,
                    )
                ]
            )
