"""Two-photon interference and Bell tests for independent single-photon emitters.

Core modules are pure and immutable: ``geometry`` (layout, phases, transit
times), ``dynamics`` (master equation and delayed correlators),
``correlations`` (coincidence densities, visibility, phase-memory state),
``bell`` (CH74 inequality and scans) and ``montecarlo`` (seeded click
simulation). A FastAPI service wraps them and the CLI is a thin client of the
same handlers.
"""

__version__ = "0.1.0"

from .bell import (
    BellGrid,
    BellSettings,
    CausalityClass,
    Ch74Result,
    PhaseAxis,
    VIOLATION_PHASES,
    bell_scan,
    causality_window_check,
    ch74_functional,
    ch74_value,
)
from .constants import SPEED_OF_LIGHT
from .correlations import (
    ConditionalState,
    FieldNormalization,
    G2Mode,
    TimingRecord,
    conditional_state,
    g2_amplitude_oracle,
    g2_analytic,
    second_detection_prob,
    visibility,
)
from .dynamics import (
    AtomState,
    CorrelatorQuery,
    evolve,
    evolve_numeric,
    regression_oracle,
    two_time_correlator,
)
from .errors import ConfigurationError, NumericalError, TwoPhotonError
from .geometry import (
    DetectorSetting,
    EmitterPair,
    FarFieldPolicy,
    far_field_check,
    optical_phase,
    phase_from_path_difference,
    transit_time,
)
from .montecarlo import (
    ClickEvent,
    CycleResult,
    EstimateReport,
    FringePoint,
    FringeScan,
    RunConfig,
    SelectionRule,
    ch74_empirical,
    collect_clicks,
    fringe_scan,
    report_from_fringe,
    run,
    simulate_cycle,
)

__all__ = [
    "__version__",
    "SPEED_OF_LIGHT",
    "AtomState",
    "BellGrid",
    "BellSettings",
    "CausalityClass",
    "Ch74Result",
    "ClickEvent",
    "ConditionalState",
    "ConfigurationError",
    "CorrelatorQuery",
    "CycleResult",
    "DetectorSetting",
    "EmitterPair",
    "EstimateReport",
    "FarFieldPolicy",
    "FieldNormalization",
    "FringePoint",
    "FringeScan",
    "G2Mode",
    "NumericalError",
    "PhaseAxis",
    "RunConfig",
    "SelectionRule",
    "TimingRecord",
    "TwoPhotonError",
    "VIOLATION_PHASES",
    "bell_scan",
    "causality_window_check",
    "ch74_empirical",
    "ch74_functional",
    "ch74_value",
    "collect_clicks",
    "conditional_state",
    "evolve",
    "evolve_numeric",
    "far_field_check",
    "fringe_scan",
    "g2_amplitude_oracle",
    "g2_analytic",
    "optical_phase",
    "phase_from_path_difference",
    "regression_oracle",
    "report_from_fringe",
    "run",
    "second_detection_prob",
    "simulate_cycle",
    "transit_time",
    "two_time_correlator",
    "visibility",
]
