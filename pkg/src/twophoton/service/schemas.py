"""Pydantic models for the run-config file and the service request/response types.

The config file is JSON with one block per concern; every command reads the
blocks it needs and fills documented defaults for the rest. Decay rates may
be given either as amplitude decay constants (1/s, population falls as
exp(-2*gamma*t)) or as a natural linewidth in Hz, in which case the amplitude
constant is pi times the linewidth so the population lifetime is
1/(2*pi*linewidth).
"""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..bell import BellGrid, BellSettings, PhaseAxis, VIOLATION_PHASES
from ..correlations import G2Mode
from ..errors import ConfigurationError
from ..geometry import DetectorSetting, EmitterPair, FarFieldPolicy
from ..montecarlo import RunConfig, SelectionRule

TWO_PI = 2.0 * math.pi


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ---------------------------------------------------------------------------
# Config file blocks
# ---------------------------------------------------------------------------

class EmitterPositions(StrictModel):
    a: tuple[float, float, float]
    b: tuple[float, float, float]


class DetectorSpec(StrictModel):
    """Either an explicit position or a (distance, xi) placement."""

    position: Optional[tuple[float, float, float]] = None
    distance: Optional[float] = Field(default=None, gt=0.0)
    xi: Optional[float] = None

    @model_validator(mode="after")
    def _one_placement(self):
        by_position = self.position is not None
        by_angle = self.distance is not None and self.xi is not None
        if by_position == by_angle:
            raise ValueError("give either 'position' or both 'distance' and 'xi'")
        return self


class FarFieldSpec(StrictModel):
    min_detector_ratio: float = Field(default=100.0, gt=0.0)
    min_separation_ratio: float = Field(default=10.0, gt=0.0)


class GeometrySpec(StrictModel):
    separation: Optional[float] = Field(default=None, gt=0.0)
    positions: Optional[EmitterPositions] = None
    wavelength: float = Field(gt=0.0)
    gamma_a: float = Field(gt=0.0)
    gamma_b: float = Field(gt=0.0)
    gamma_unit: Literal["amplitude_per_s", "linewidth_hz"] = "amplitude_per_s"
    detectors: list[DetectorSpec] = Field(min_length=1)
    far_field: FarFieldSpec = FarFieldSpec()

    @model_validator(mode="after")
    def _one_layout(self):
        if (self.separation is None) == (self.positions is None):
            raise ValueError("give either 'separation' or explicit 'positions'")
        return self

    @property
    def amplitude_gamma_a(self) -> float:
        return self.gamma_a * math.pi if self.gamma_unit == "linewidth_hz" else self.gamma_a

    @property
    def amplitude_gamma_b(self) -> float:
        return self.gamma_b * math.pi if self.gamma_unit == "linewidth_hz" else self.gamma_b


class TimingSpec(StrictModel):
    """Detection times in seconds; defaults put each detection right at its transit."""

    t1: Optional[float] = None
    t2: Optional[float] = None


class ScanSpec(StrictModel):
    """Phase sweep for g2-scan: phi2 over [start, stop) in ``points`` steps."""

    points: int = Field(default=24, ge=2)
    start: float = 0.0
    stop: float = TWO_PI
    phi1: Optional[float] = None  # default: detector 1's derived phase


class McSpec(StrictModel):
    trials: int = Field(default=100_000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    selection: Literal[
        "all", "no_overlap_and_no_signaling", "no_overlap_only", "overlapping"
    ] = "all"
    mode: Literal["single_envelope", "dual_envelope"] = "single_envelope"
    fringe_points: int = Field(default=24, ge=2)


class BellSpec(StrictModel):
    """Four phase settings; defaults are the canonical violation phases."""

    phi1: float = VIOLATION_PHASES[0]
    phi1p: float = VIOLATION_PHASES[1]
    phi2: float = VIOLATION_PHASES[2]
    phi2p: float = VIOLATION_PHASES[3]
    t10: Optional[float] = None  # default: the shared transit time
    t20: Optional[float] = None
    transit: Optional[float] = None  # default: mean detector transit


class BellScanAxisSpec(StrictModel):
    start_deg: float = 0.0
    stop_deg: float = 360.0
    step_deg: float = Field(default=5.0, gt=0.0)

    def to_axis(self) -> PhaseAxis:
        return PhaseAxis(
            start=math.radians(self.start_deg),
            stop=math.radians(self.stop_deg),
            step=math.radians(self.step_deg),
        )


class BellScanSpec(StrictModel):
    d12: BellScanAxisSpec = BellScanAxisSpec()
    d12p: BellScanAxisSpec = BellScanAxisSpec()
    d1p2: BellScanAxisSpec = BellScanAxisSpec()
    max_kept: int = Field(default=500_000, ge=0)

    def to_grid(self) -> BellGrid:
        return BellGrid(d12=self.d12.to_axis(), d12p=self.d12p.to_axis(), d1p2=self.d1p2.to_axis())


class TimingCheckSpec(StrictModel):
    requested_delay: Optional[float] = Field(default=None, gt=0.0)


class RunConfigSpec(StrictModel):
    """Top-level run configuration; one block per concern."""

    geometry: GeometrySpec
    timing: TimingSpec = TimingSpec()
    scan: ScanSpec = ScanSpec()
    montecarlo: McSpec = McSpec()
    bell: BellSpec = BellSpec()
    bell_scan: BellScanSpec = BellScanSpec()
    timing_check: TimingCheckSpec = TimingCheckSpec()


# ---------------------------------------------------------------------------
# Builders from config blocks to core objects
# ---------------------------------------------------------------------------

def build_pair(geometry: GeometrySpec) -> EmitterPair:
    policy = FarFieldPolicy(
        min_detector_ratio=geometry.far_field.min_detector_ratio,
        min_separation_ratio=geometry.far_field.min_separation_ratio,
    )
    if geometry.separation is not None:
        return EmitterPair.from_separation(
            separation=geometry.separation,
            wavelength=geometry.wavelength,
            gamma_a=geometry.amplitude_gamma_a,
            gamma_b=geometry.amplitude_gamma_b,
            far_field=policy,
        )
    return EmitterPair(
        position_a=geometry.positions.a,
        position_b=geometry.positions.b,
        wavelength=geometry.wavelength,
        gamma_a=geometry.amplitude_gamma_a,
        gamma_b=geometry.amplitude_gamma_b,
        far_field=policy,
    )


def build_detectors(geometry: GeometrySpec, pair: EmitterPair) -> list[DetectorSetting]:
    detectors = []
    for index, spec in enumerate(geometry.detectors):
        try:
            if spec.position is not None:
                detectors.append(DetectorSetting.from_position(pair, spec.position))
            else:
                detectors.append(DetectorSetting.from_angle(pair, spec.distance, spec.xi))
        except ValueError as exc:
            raise ConfigurationError(f"detector {index}: {exc}") from exc
    return detectors


def require_two_detectors(detectors: list[DetectorSetting]) -> tuple[DetectorSetting, DetectorSetting]:
    if len(detectors) < 2:
        raise ConfigurationError("this command needs at least two detectors")
    return detectors[0], detectors[1]


def shared_transit(d1: DetectorSetting, d2: DetectorSetting) -> float:
    return 0.5 * (d1.transit + d2.transit)


def require_equal_gammas(pair: EmitterPair, what: str) -> float:
    if pair.gamma_a != pair.gamma_b:
        raise ConfigurationError(f"{what} assumes equal decay rates, got "
                                 f"gamma_a={pair.gamma_a:.6g}, gamma_b={pair.gamma_b:.6g}")
    return pair.gamma_a


def build_bell_settings(config: RunConfigSpec) -> BellSettings:
    pair = build_pair(config.geometry)
    d1, d2 = require_two_detectors(build_detectors(config.geometry, pair))
    gamma = require_equal_gammas(pair, "the CH74 evaluation")
    transit = config.bell.transit if config.bell.transit is not None else shared_transit(d1, d2)
    t10 = config.bell.t10 if config.bell.t10 is not None else transit
    t20 = config.bell.t20 if config.bell.t20 is not None else t10
    return BellSettings(
        phi1=config.bell.phi1,
        phi1p=config.bell.phi1p,
        phi2=config.bell.phi2,
        phi2p=config.bell.phi2p,
        t10=t10,
        t20=t20,
        gamma=gamma,
        transit=transit,
    )


def build_run_config(
    config: RunConfigSpec,
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    mode: Optional[str] = None,
) -> RunConfig:
    pair = build_pair(config.geometry)
    d1, d2 = require_two_detectors(build_detectors(config.geometry, pair))
    mc = config.montecarlo
    return RunConfig(
        trials=trials if trials is not None else mc.trials,
        seed=seed if seed is not None else mc.seed,
        pair=pair,
        detector1=d1,
        detector2=d2,
        selection=SelectionRule(mc.selection),
        mode=G2Mode(mode if mode is not None else mc.mode),
        fringe_points=mc.fringe_points,
    )


# ---------------------------------------------------------------------------
# Request / response models
# ---------------------------------------------------------------------------

class G2ScanRequest(StrictModel):
    config: RunConfigSpec
    mode: Optional[Literal["single_envelope", "dual_envelope"]] = None


class G2ScanRow(StrictModel):
    phi1: float
    phi2: float
    t1: float
    t2: float
    g2: float
    mode: str


class G2ScanResponse(StrictModel):
    rows: list[G2ScanRow]


class VisibilityRequest(StrictModel):
    config: RunConfigSpec
    mode: Optional[Literal["single_envelope", "dual_envelope"]] = None


class VisibilityResponse(StrictModel):
    visibility: float
    mode: str
    t1: float
    t2: float
    gamma_a: float
    gamma_b: float


class BellTestRequest(StrictModel):
    config: RunConfigSpec


class BellTestResponse(StrictModel):
    value: float
    lower_bound: float
    upper_bound: float
    violated: bool
    margin: float
    raw_value: float
    time_factor: float
    causality: str
    deltas: tuple[float, float, float, float]


class BellScanRequest(StrictModel):
    config: RunConfigSpec


class BellScanPoint(StrictModel):
    d12: float
    d12p: float
    d1p2: float
    d1p2p: float
    value: float
    violated: bool


class BellScanResponse(StrictModel):
    max_value: float
    best: BellScanPoint
    n_points: int
    n_violations: int
    results: Optional[list[BellScanPoint]] = None


class McRunRequest(StrictModel):
    config: RunConfigSpec
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)
    trials: Optional[int] = Field(default=None, ge=1)
    mode: Optional[Literal["single_envelope", "dual_envelope"]] = None


class FringePointModel(StrictModel):
    delta_phi: float
    trials: int
    window_passed: int
    accepted: int
    acceptance: Optional[float]


class McRunResponse(StrictModel):
    trials: int
    accepted_trials: int
    g2_estimate: Optional[float]
    visibility_estimate: Optional[float]
    standard_error: Optional[float]
    ch74_estimate: Optional[float] = None
    zero_acceptance: bool
    seed: int
    selection: str
    mode: str
    fringe: list[FringePointModel]


class TimingCheckRequest(StrictModel):
    config: RunConfigSpec


class TimingCheckResponse(StrictModel):
    gamma_amplitude_per_s: float
    lifetime_s: float
    transits_s: list[float]
    transit_s: float
    window_low_s: float
    window_high_s: float
    requested_delay_s: Optional[float] = None
    classification: Optional[str] = None


class ClickRow(StrictModel):
    trial: int
    detector: int
    detection_time_ns: float
    emission_time_ns: float
    phase_setting_rad: float
    accepted: bool


class HealthResponse(StrictModel):
    status: str
    version: str


class ErrorResponse(StrictModel):
    error: dict
