"""Emitter/detector layout and far-field interference phases.

Two single-photon emitters sit a distance d apart with d much larger than the
transition wavelength; detectors sit in their common far field. A detector
whose direction makes an angle xi with the plane bisecting the emitter axis
picks up a relative phase d*k*sin(xi) between the two emission paths. The
same phase follows from the difference of the plane-wave exponents of the two
source terms, which gives an independent validation route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import (
    DEFAULT_MIN_DETECTOR_RATIO,
    DEFAULT_MIN_SEPARATION_RATIO,
    SPEED_OF_LIGHT,
)
from .errors import ConfigurationError


def _as_vec3(value) -> np.ndarray:
    vec = np.array(value, dtype=float)
    if vec.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {vec.shape}")
    vec.flags.writeable = False
    return vec


@dataclass(frozen=True)
class FarFieldPolicy:
    """Numeric thresholds for the far-field validity checks.

    ``min_detector_ratio`` bounds min(|r - R_a|, |r - R_b|)/d from below and
    ``min_separation_ratio`` bounds d/wavelength. Both comparisons are
    inclusive.
    """

    min_detector_ratio: float = DEFAULT_MIN_DETECTOR_RATIO
    min_separation_ratio: float = DEFAULT_MIN_SEPARATION_RATIO


@dataclass(frozen=True, eq=False)
class EmitterPair:
    """Two fixed single-photon emitters sharing one transition wavelength.

    ``gamma_a`` and ``gamma_b`` are amplitude decay constants in 1/s: the
    excited-state population of each emitter decays as exp(-2*gamma*t).

    Attributes
    ----------
    position_a, position_b : numpy.ndarray
        Emitter locations in meters.
    wavelength : float
        Transition wavelength in meters.
    gamma_a, gamma_b : float
        Amplitude decay constants in 1/s.
    far_field : FarFieldPolicy
        Thresholds applied to this pair and its detectors.
    """

    position_a: np.ndarray
    position_b: np.ndarray
    wavelength: float
    gamma_a: float
    gamma_b: float
    far_field: FarFieldPolicy = field(default_factory=FarFieldPolicy)

    def __post_init__(self):
        object.__setattr__(self, "position_a", _as_vec3(self.position_a))
        object.__setattr__(self, "position_b", _as_vec3(self.position_b))
        if self.wavelength <= 0.0:
            raise ConfigurationError("wavelength must be positive")
        if self.gamma_a <= 0.0 or self.gamma_b <= 0.0:
            raise ConfigurationError("decay constants gamma_a, gamma_b must be positive")
        if self.separation == 0.0:
            raise ConfigurationError("emitter positions must not coincide")
        ratio = self.separation / self.wavelength
        if ratio < self.far_field.min_separation_ratio:
            raise ConfigurationError(
                f"separation/wavelength = {ratio:.6g} is below the far-field "
                f"threshold {self.far_field.min_separation_ratio:.6g}"
            )

    @classmethod
    def from_separation(
        cls,
        separation: float,
        wavelength: float,
        gamma_a: float,
        gamma_b: float,
        far_field: FarFieldPolicy | None = None,
    ) -> "EmitterPair":
        """Build a pair on the x axis with its midpoint at the origin."""
        half = 0.5 * separation
        return cls(
            position_a=np.array([-half, 0.0, 0.0]),
            position_b=np.array([half, 0.0, 0.0]),
            wavelength=wavelength,
            gamma_a=gamma_a,
            gamma_b=gamma_b,
            far_field=far_field if far_field is not None else FarFieldPolicy(),
        )

    @property
    def separation(self) -> float:
        """Distance between the two emitters in meters."""
        return float(np.linalg.norm(self.position_b - self.position_a))

    @property
    def wavenumber(self) -> float:
        """Wave number 2*pi/wavelength in rad/m."""
        return 2.0 * math.pi / self.wavelength

    @property
    def omega(self) -> float:
        """Angular transition frequency 2*pi*c/wavelength in rad/s."""
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.wavelength

    @property
    def midpoint(self) -> np.ndarray:
        """Point halfway between the emitters."""
        return 0.5 * (self.position_a + self.position_b)

    @property
    def axis_unit(self) -> np.ndarray:
        """Unit vector from emitter a to emitter b."""
        return (self.position_b - self.position_a) / self.separation


def sin_detector_angle(pair: EmitterPair, detector_position) -> float:
    """sin(xi) for a detector, with xi measured from the bisector plane.

    The angle is taken between the detector direction (seen from the emitter
    midpoint) and the plane through the midpoint perpendicular to the emitter
    axis, so a detector on that plane has xi = 0.
    """
    rel = np.asarray(detector_position, dtype=float) - pair.midpoint
    dist = float(np.linalg.norm(rel))
    if dist == 0.0:
        raise ValueError("detector must not sit at the emitter midpoint")
    return float(np.clip(float(rel @ pair.axis_unit) / dist, -1.0, 1.0))


def detector_distance_ratio(pair: EmitterPair, detector_position) -> float:
    """min over emitters of |r - R_n| divided by the emitter separation."""
    pos = np.asarray(detector_position, dtype=float)
    dist_a = float(np.linalg.norm(pos - pair.position_a))
    dist_b = float(np.linalg.norm(pos - pair.position_b))
    return min(dist_a, dist_b) / pair.separation


def _require_far_field(pair: EmitterPair, detector_position) -> None:
    ratio = detector_distance_ratio(pair, detector_position)
    if ratio < pair.far_field.min_detector_ratio:
        raise ConfigurationError(
            f"detector distance ratio min|r - R_n|/d = {ratio:.6g} is below "
            f"the far-field threshold {pair.far_field.min_detector_ratio:.6g}"
        )


def optical_phase(pair: EmitterPair, detector_position) -> float:
    """Relative two-path phase d*k*sin(xi) for a far-field detector.

    Parameters
    ----------
    pair : EmitterPair
        Emitter layout providing d, k and the far-field policy.
    detector_position : array_like
        Detector location in meters.

    Returns
    -------
    float
        Phase in radians. Odd in xi and bounded by d*k in magnitude.

    Raises
    ------
    ConfigurationError
        If the detector violates the far-field distance threshold.
    """
    _require_far_field(pair, detector_position)
    return pair.separation * pair.wavenumber * sin_detector_angle(pair, detector_position)


def phase_from_path_difference(pair: EmitterPair, detector_position) -> float:
    """Same phase from the plane-wave exponent difference k*rhat.(R_b - R_a).

    ``rhat`` is the detector direction from the coordinate origin, so this
    form coincides with :func:`optical_phase` exactly when the emitter
    midpoint sits at the origin. Kept as an independent route for validation.
    """
    pos = _as_vec3(detector_position)
    norm = float(np.linalg.norm(pos))
    if norm == 0.0:
        raise ValueError("detector position must be nonzero")
    rhat = pos / norm
    return pair.wavenumber * float(rhat @ (pair.position_b - pair.position_a))


def transit_time(detector_position) -> float:
    """Photon travel time |r|/c from the source region to the detector.

    Raises
    ------
    ValueError
        If the position has zero length.
    """
    norm = float(np.linalg.norm(np.asarray(detector_position, dtype=float)))
    if norm == 0.0:
        raise ValueError("detector position must have nonzero length")
    return norm / SPEED_OF_LIGHT


def _perpendicular_unit(axis: np.ndarray) -> np.ndarray:
    # Pick the coordinate axis least aligned with the emitter axis, then
    # Gram-Schmidt it against the axis.
    trial = np.zeros(3)
    trial[int(np.argmin(np.abs(axis)))] = 1.0
    perp = trial - (trial @ axis) * axis
    return perp / np.linalg.norm(perp)


@dataclass(frozen=True, eq=False)
class DetectorSetting:
    """A detector location with its derived phase and transit time.

    Attributes
    ----------
    position : numpy.ndarray
        Detector location in meters.
    unit_direction : numpy.ndarray
        position/|position| (unit length).
    angle_xi : float
        Angle off the bisector plane in radians.
    phase : float
        Two-path interference phase d*k*sin(xi) in radians.
    transit : float
        Travel time |position|/c in seconds.
    """

    position: np.ndarray
    unit_direction: np.ndarray
    angle_xi: float
    phase: float
    transit: float

    def __post_init__(self):
        object.__setattr__(self, "position", _as_vec3(self.position))
        object.__setattr__(self, "unit_direction", _as_vec3(self.unit_direction))

    @classmethod
    def from_position(cls, pair: EmitterPair, position) -> "DetectorSetting":
        """Derive all detector quantities from an explicit location."""
        pos = _as_vec3(position)
        phase = optical_phase(pair, pos)  # also enforces the far-field check
        sin_xi = sin_detector_angle(pair, pos)
        return cls(
            position=pos,
            unit_direction=pos / float(np.linalg.norm(pos)),
            angle_xi=math.asin(sin_xi),
            phase=phase,
            transit=transit_time(pos),
        )

    @classmethod
    def from_angle(cls, pair: EmitterPair, distance: float, xi: float) -> "DetectorSetting":
        """Place a detector ``distance`` from the emitter midpoint at angle ``xi``.

        The detector lies in the plane spanned by the emitter axis and a fixed
        perpendicular direction; xi = 0 is on the bisector plane.
        """
        if distance <= 0.0:
            raise ConfigurationError("detector distance must be positive")
        axis = pair.axis_unit
        perp = _perpendicular_unit(axis)
        position = pair.midpoint + distance * (math.sin(xi) * axis + math.cos(xi) * perp)
        return cls.from_position(pair, position)


@dataclass(frozen=True)
class FarFieldEntry:
    """Distance ratio and pass/fail verdict for one detector."""

    ratio: float
    passed: bool


@dataclass(frozen=True)
class FarFieldReport:
    """Outcome of the far-field validity check for a full layout."""

    separation_ratio: float
    separation_ok: bool
    detectors: tuple[FarFieldEntry, ...]

    @property
    def all_ok(self) -> bool:
        return self.separation_ok and all(entry.passed for entry in self.detectors)


def far_field_check(pair: EmitterPair, detector_positions) -> FarFieldReport:
    """Report far-field ratios for every detector without raising.

    Thresholds are inclusive: a ratio exactly at the threshold passes.
    """
    sep_ratio = pair.separation / pair.wavelength
    entries = []
    for position in detector_positions:
        ratio = detector_distance_ratio(pair, position)
        entries.append(FarFieldEntry(ratio=ratio, passed=ratio >= pair.far_field.min_detector_ratio))
    return FarFieldReport(
        separation_ratio=sep_ratio,
        separation_ok=sep_ratio >= pair.far_field.min_separation_ratio,
        detectors=tuple(entries),
    )
