"""Exception hierarchy shared by every droneplan module."""

from __future__ import annotations


class DronePlanError(Exception):
    pass


# model


class InvalidSampleError(DronePlanError, ValueError):
    pass


class InvalidDurationError(DronePlanError, ValueError):
    pass


class InsufficientDataError(DronePlanError, ValueError):
    def __init__(self, required: int, given: int) -> None:
        self.required = required
        self.given = given
        super().__init__(f"at least {required} samples are required, {given} given")


class DegenerateDesignError(DronePlanError, ValueError):
    def __init__(self, dependent: list[str]) -> None:
        self.dependent = dependent
        super().__init__(
            "design matrix is rank deficient; linearly dependent columns: "
            + ", ".join(dependent)
        )


class NonPhysicalRateError(DronePlanError, ValueError):
    pass


# scenario


class ScenarioFormatError(DronePlanError, ValueError):
    pass


class InfeasibleSiteError(DronePlanError):
    def __init__(self, site: str, distance: float, limit: float) -> None:
        self.site = site
        self.distance = distance
        self.limit = limit
        super().__init__(
            f"location {site!r} is {distance:.6g} Wh from the nearest charging "
            f"station, beyond the half-range limit {limit:.6g} Wh"
        )


# graphkit


class NoSpanningTreeError(DronePlanError):
    pass


class NotEulerianError(DronePlanError):
    pass


class MatchingContractError(DronePlanError, ValueError):
    pass


# planner


class InfeasibleScenarioError(DronePlanError):
    pass


class MalformedPlanError(DronePlanError, ValueError):
    pass


class CannotFixChargeError(DronePlanError):
    pass


class BenchmarkFailedError(DronePlanError):
    pass


class OracleLimitError(DronePlanError):
    pass


class InternalConsistencyError(DronePlanError, AssertionError):
    pass
