"""CH74 coincidence inequality for four detector phase settings.

With both detection times pinned across the primed and unprimed settings, the
common exponential factor drops out of the inequality and it reduces to

    -1 <= (1/2)*(cos d12 - cos d12p + cos d1p2 + cos d1p2p) - 1 <= 0

on the four relative phases d_ij. The interference fringes push the middle
expression up to sqrt(2) - 1, above the local-model bound of 0. The raw
(time-carrying) value is the canceled one multiplied by the common factor and
is reported alongside it.

The detection-time window (transit, 2*transit) singles out cycles whose
photons never coexisted while also excluding light-speed signaling between
the detection events; both comparisons are strict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import BELL_BOUND_TOL
from .errors import ConfigurationError

# Phases (phi1, phi1p, phi2, phi2p) whose relative-phase magnitudes are the
# canonical violation angles (pi/4, 3pi/4, pi/4, pi/4); the realized deltas
# are (pi/4, 3pi/4, -pi/4, pi/4), the sign being forced by the consistency
# constraint d12 - d12p - d1p2 + d1p2p = 0.
VIOLATION_PHASES = (math.pi / 4.0, -math.pi / 4.0, 0.0, -math.pi / 2.0)

CH74_LOWER_BOUND = -1.0
CH74_UPPER_BOUND = 0.0


class CausalityClass(str, Enum):
    """Timing relation between two ordered detection events."""

    NO_OVERLAP_AND_NO_SIGNALING = "no_overlap_and_no_signaling"
    NO_OVERLAP_ONLY = "no_overlap_only"
    OVERLAPPING = "overlapping"


def classify_delay(delay: float, transit: float) -> CausalityClass:
    """Classify a nonnegative detection-time difference against the window.

    Strict comparisons: a delay equal to the transit time still counts as
    overlapping, and one equal to twice the transit already allows signaling.
    """
    if delay <= transit:
        return CausalityClass.OVERLAPPING
    if delay < 2.0 * transit:
        return CausalityClass.NO_OVERLAP_AND_NO_SIGNALING
    return CausalityClass.NO_OVERLAP_ONLY


def causality_window_check(t1: float, t2: float, transit: float) -> CausalityClass:
    """Classify ordered detection times (t2 >= t1 >= transit)."""
    if transit <= 0.0:
        raise ValueError("transit time must be positive")
    if t2 < t1:
        raise ValueError("detection times must be ordered: t2 >= t1")
    if t1 < transit:
        raise ValueError("detection times must not precede the transit time")
    return classify_delay(t2 - t1, transit)


@dataclass(frozen=True)
class BellSettings:
    """Four detector phase settings sharing pinned detection times.

    The primed and unprimed settings of each detector reuse the same pinned
    time (t10 for detector 1, t20 for detector 2), which is what makes the
    time factors cancel. Decay rates are assumed equal (one ``gamma``).
    """

    phi1: float
    phi1p: float
    phi2: float
    phi2p: float
    t10: float = 0.0
    t20: float = 0.0
    gamma: float = 1.0
    transit: float = 0.0

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ConfigurationError("gamma must be positive")
        if self.transit < 0.0:
            raise ConfigurationError("transit time must be nonnegative")
        if self.t10 > self.t20:
            raise ConfigurationError("pinned times must be ordered: t10 <= t20")
        if self.emission1 < 0.0 or self.emission2 < 0.0:
            raise ConfigurationError("pinned times must not precede the transit time")

    @property
    def emission1(self) -> float:
        return self.t10 - self.transit

    @property
    def emission2(self) -> float:
        return self.t20 - self.transit

    @property
    def deltas(self) -> tuple[float, float, float, float]:
        """(d12, d12p, d1p2, d1p2p) relative phases."""
        return (
            self.phi1 - self.phi2,
            self.phi1 - self.phi2p,
            self.phi1p - self.phi2,
            self.phi1p - self.phi2p,
        )


@dataclass(frozen=True)
class Ch74Result:
    """Canceled-form CH74 value against its local bounds [-1, 0].

    ``raw_value`` restores the common exponential time factor; ``margin`` is
    positive by the amount the value lies outside the bounds.
    """

    value: float
    lower_bound: float
    upper_bound: float
    violated: bool
    margin: float
    raw_value: float
    time_factor: float
    deltas: tuple[float, float, float, float]


def ch74_value(d12: float, d12p: float, d1p2: float, d1p2p: float) -> float:
    """Time-canceled CH74 combination of the four relative phases."""
    return 0.5 * (math.cos(d12) - math.cos(d12p) + math.cos(d1p2) + math.cos(d1p2p)) - 1.0


def _make_result(value: float, time_factor: float, deltas) -> Ch74Result:
    violated = value > CH74_UPPER_BOUND + BELL_BOUND_TOL or value < CH74_LOWER_BOUND - BELL_BOUND_TOL
    margin = max(value - CH74_UPPER_BOUND, CH74_LOWER_BOUND - value)
    return Ch74Result(
        value=value,
        lower_bound=CH74_LOWER_BOUND,
        upper_bound=CH74_UPPER_BOUND,
        violated=violated,
        margin=margin,
        raw_value=value * time_factor,
        time_factor=time_factor,
        deltas=tuple(deltas),
    )


def ch74_functional(settings: BellSettings) -> Ch74Result:
    """Evaluate the inequality at the settings' pinned times."""
    time_factor = math.exp(-2.0 * settings.gamma * (settings.emission1 + settings.emission2))
    deltas = settings.deltas
    return _make_result(ch74_value(*deltas), time_factor, deltas)


@dataclass(frozen=True)
class PhaseAxis:
    """Half-open grid [start, stop) with the given step, all in radians."""

    start: float = 0.0
    stop: float = 2.0 * math.pi
    step: float = math.radians(5.0)

    def values(self) -> np.ndarray:
        if self.step <= 0.0:
            raise ConfigurationError("grid step must be positive")
        return np.arange(self.start, self.stop, self.step)


@dataclass(frozen=True)
class BellGrid:
    """Grid over the three independent relative phases.

    The fourth phase difference is fixed by consistency:
    d1p2p = d12p + d1p2 - d12.
    """

    d12: PhaseAxis = PhaseAxis()
    d12p: PhaseAxis = PhaseAxis()
    d1p2: PhaseAxis = PhaseAxis()


@dataclass(frozen=True)
class BellScanReport:
    """Summary of a grid scan, with per-point results for grids under the cap."""

    max_value: float
    best: Ch74Result
    n_points: int
    n_violations: int
    results: tuple[Ch74Result, ...] | None


def bell_scan(
    gamma: float,
    transit: float,
    grid: BellGrid,
    t10: float | None = None,
    t20: float | None = None,
    keep_results: bool | None = None,
    max_kept: int = 500_000,
) -> BellScanReport:
    """Exhaustive scan of the canceled CH74 value over a phase-difference grid.

    All grid points share the pinned timing (defaults: detections right at the
    transit time, so the time factor is 1). Evaluation is chunked along the
    first axis so arbitrarily fine grids stay within memory; per-point results
    are materialized only when the grid is small enough (or ``keep_results``
    forces it).
    """
    a_vals = grid.d12.values()
    b_vals = grid.d12p.values()
    c_vals = grid.d1p2.values()
    n_points = a_vals.size * b_vals.size * c_vals.size
    if n_points == 0:
        raise ConfigurationError("bell scan grid is empty")
    if keep_results is None:
        keep_results = n_points <= max_kept

    pinned_t10 = transit if t10 is None else t10
    pinned_t20 = transit if t20 is None else t20
    reference = BellSettings(
        phi1=0.0, phi1p=0.0, phi2=0.0, phi2p=0.0,
        t10=pinned_t10, t20=pinned_t20, gamma=gamma, transit=transit,
    )
    time_factor = math.exp(-2.0 * gamma * (reference.emission1 + reference.emission2))

    cos_b = np.cos(b_vals)
    cos_c = np.cos(c_vals)
    # b + c grid reused across the chunks over a
    bc_sum = b_vals[:, None] + c_vals[None, :]
    base = -cos_b[:, None] + cos_c[None, :]

    best_value = -math.inf
    best_deltas = None
    n_violations = 0
    collected: list[Ch74Result] | None = [] if keep_results else None

    for a in a_vals:
        values = 0.5 * (math.cos(a) + base + np.cos(bc_sum - a)) - 1.0
        n_violations += int(np.count_nonzero(values > CH74_UPPER_BOUND + BELL_BOUND_TOL))
        n_violations += int(np.count_nonzero(values < CH74_LOWER_BOUND - BELL_BOUND_TOL))
        flat_idx = int(np.argmax(values))
        chunk_max = float(values.flat[flat_idx])
        if chunk_max > best_value:
            i_b, i_c = np.unravel_index(flat_idx, values.shape)
            b, c = float(b_vals[i_b]), float(c_vals[i_c])
            best_value = chunk_max
            best_deltas = (float(a), b, c, b + c - float(a))
        if collected is not None:
            for i_b, b in enumerate(b_vals):
                for i_c, c in enumerate(c_vals):
                    deltas = (float(a), float(b), float(c), float(b) + float(c) - float(a))
                    collected.append(_make_result(float(values[i_b, i_c]), time_factor, deltas))

    return BellScanReport(
        max_value=best_value,
        best=_make_result(best_value, time_factor, best_deltas),
        n_points=int(n_points),
        n_violations=n_violations,
        results=tuple(collected) if collected is not None else None,
    )
