"""Seeded stochastic measurement cycles for the two-emitter interferometer.

A cycle excites both emitters once. Each releases its photon at an
exponential random time (density 2*gamma*exp(-2*gamma*t), matching the
population decay law); the earlier photon is routed to a uniformly chosen
detector, leaving the entangled phase-memory state behind; the second
detection at the other detector is then accepted with the conditional fringe
probability, which realizes the one-photon-per-detector post-selection.
Accepted cycles are finally filtered by the configured detection-time window.

Randomness is drawn from per-(stream, block) substreams derived from the run
seed with spawn keys, so any partition of blocks across workers reproduces
the serial result bit for bit. The worker count comes from the
``TWOPHOTON_WORKERS`` environment variable (default 1).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from multiprocessing import Pool

import numpy as np

from .bell import BellSettings, CausalityClass, classify_delay
from .correlations import G2Mode, conditional_state, second_detection_prob
from .errors import ConfigurationError
from .geometry import DetectorSetting, EmitterPair

_BLOCK = 1 << 16
_WORKERS_ENV = "TWOPHOTON_WORKERS"

# Substream namespaces so fringe points, CH74 sub-runs and click streams never
# share random numbers.
_KIND_FRINGE = 0
_KIND_CH74 = 1
_KIND_CLICKS = 2


class SelectionRule(str, Enum):
    """Which detection-time window accepted cycles must fall into."""

    ALL = "all"
    NO_OVERLAP_AND_NO_SIGNALING = CausalityClass.NO_OVERLAP_AND_NO_SIGNALING.value
    NO_OVERLAP_ONLY = CausalityClass.NO_OVERLAP_ONLY.value
    OVERLAPPING = CausalityClass.OVERLAPPING.value


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Full description of a seeded Monte Carlo run."""

    trials: int
    seed: int
    pair: EmitterPair
    detector1: DetectorSetting
    detector2: DetectorSetting
    selection: SelectionRule = SelectionRule.ALL
    mode: G2Mode = G2Mode.SINGLE_ENVELOPE
    fringe_points: int = 24

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must fit in an unsigned 64-bit integer")
        if self.fringe_points < 2:
            raise ConfigurationError("a fringe scan needs at least 2 points")

    @property
    def transit_reference(self) -> float:
        """Shared transit time for window classification (detector mean)."""
        return 0.5 * (self.detector1.transit + self.detector2.transit)


@dataclass(frozen=True)
class ClickEvent:
    """One detection: which detector fired, when, and at what phase setting."""

    trial: int
    detector: int
    detection_time: float
    emission_time: float
    phase_setting: float


@dataclass(frozen=True)
class CycleResult:
    """Outcome of a single measurement cycle.

    ``clicks`` always holds the (would-be) detection pair ordered by emission;
    ``accepted`` combines the fringe draw and the window selection, and
    ``rejection`` names which step failed first.
    """

    clicks: tuple[ClickEvent, ClickEvent]
    fringe_accepted: bool
    causality: CausalityClass
    accepted: bool

    @property
    def rejection(self) -> str | None:
        if self.accepted:
            return None
        return "fringe" if not self.fringe_accepted else "window"


@dataclass(frozen=True)
class EstimateReport:
    """Point estimates from a run, with binomial standard errors.

    When no cycle survives the selection, the estimates are NaN and
    ``zero_acceptance`` is set. ``g2_estimate`` is the acceptance probability
    at the configured detector pair normalized by the (phase-independent)
    window acceptance, so a bright fringe sits at 1.
    """

    trials: int
    accepted_trials: int
    g2_estimate: float | None
    visibility_estimate: float | None
    standard_error: float
    ch74_estimate: float | None = None
    zero_acceptance: bool = False

    def __post_init__(self):
        if self.accepted_trials > self.trials:
            raise ConfigurationError("accepted trials cannot exceed total trials")
        if not math.isnan(self.standard_error) and self.standard_error < 0.0:
            raise ConfigurationError("standard error must be nonnegative")


def _block_rng(seed: int, kind: int, stream: int, block: int) -> np.random.Generator:
    """Deterministic substream generator for one block of trials."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(kind, stream, block)))


def simulate_cycle(rng: np.random.Generator, config: RunConfig, trial: int = 0) -> CycleResult:
    """Run one measurement cycle with the given generator.

    Draw order (fixed): emission time of emitter a, emission time of emitter
    b, first-photon detector choice, fringe-acceptance uniform.
    """
    tau_a = rng.exponential(0.5 / config.pair.gamma_a)
    tau_b = rng.exponential(0.5 / config.pair.gamma_b)
    first_is_det1 = int(rng.integers(0, 2)) == 0
    u = rng.random()

    tau_first, tau_second = (tau_a, tau_b) if tau_a <= tau_b else (tau_b, tau_a)
    det_first = config.detector1 if first_is_det1 else config.detector2
    det_second = config.detector2 if first_is_det1 else config.detector1

    memory = conditional_state(det_first.phase)
    fringe_accepted = u < second_detection_prob(memory, det_second.phase)

    t_first = tau_first + det_first.transit
    t_second = tau_second + det_second.transit
    low, high = min(t_first, t_second), max(t_first, t_second)
    causality = classify_delay(high - low, config.transit_reference)
    window_ok = (
        config.selection is SelectionRule.ALL
        or causality.value == config.selection.value
    )

    clicks = (
        ClickEvent(
            trial=trial,
            detector=1 if first_is_det1 else 2,
            detection_time=t_first,
            emission_time=tau_first,
            phase_setting=det_first.phase,
        ),
        ClickEvent(
            trial=trial,
            detector=2 if first_is_det1 else 1,
            detection_time=t_second,
            emission_time=tau_second,
            phase_setting=det_second.phase,
        ),
    )
    return CycleResult(
        clicks=clicks,
        fringe_accepted=fringe_accepted,
        causality=causality,
        accepted=fringe_accepted and window_ok,
    )


# ---------------------------------------------------------------------------
# Vectorized block kernel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _BlockTask:
    """Picklable description of one block of trials for one phase setting."""

    seed: int
    kind: int
    stream: int
    block: int
    n: int
    gamma_a: float
    gamma_b: float
    phi1: float
    phi2: float
    transit1: float
    transit2: float
    transit_ref: float
    selection: str


@dataclass(frozen=True)
class _BlockCounts:
    stream: int
    n: int
    window_passed: int
    accepted: int
    accepted_overlapping: int
    accepted_no_overlap_window: int
    accepted_no_overlap_only: int


def _run_block(task: _BlockTask) -> _BlockCounts:
    rng = _block_rng(task.seed, task.kind, task.stream, task.block)
    n = task.n
    tau_a = rng.exponential(0.5 / task.gamma_a, n)
    tau_b = rng.exponential(0.5 / task.gamma_b, n)
    first_is_det1 = rng.integers(0, 2, n) == 0
    u = rng.random(n)

    tau_first = np.minimum(tau_a, tau_b)
    tau_second = np.maximum(tau_a, tau_b)
    phi_first = np.where(first_is_det1, task.phi1, task.phi2)
    phi_other = np.where(first_is_det1, task.phi2, task.phi1)
    fringe_ok = u < 0.5 * (1.0 + np.cos(phi_other - phi_first))

    t_first = tau_first + np.where(first_is_det1, task.transit1, task.transit2)
    t_second = tau_second + np.where(first_is_det1, task.transit2, task.transit1)
    delay = np.abs(t_second - t_first)
    overlapping = delay <= task.transit_ref
    in_window = ~overlapping & (delay < 2.0 * task.transit_ref)
    no_overlap_only = delay >= 2.0 * task.transit_ref

    if task.selection == SelectionRule.ALL.value:
        window_ok = np.ones(n, dtype=bool)
    elif task.selection == SelectionRule.OVERLAPPING.value:
        window_ok = overlapping
    elif task.selection == SelectionRule.NO_OVERLAP_AND_NO_SIGNALING.value:
        window_ok = in_window
    else:
        window_ok = no_overlap_only

    accepted = fringe_ok & window_ok
    return _BlockCounts(
        stream=task.stream,
        n=n,
        window_passed=int(np.count_nonzero(window_ok)),
        accepted=int(np.count_nonzero(accepted)),
        accepted_overlapping=int(np.count_nonzero(accepted & overlapping)),
        accepted_no_overlap_window=int(np.count_nonzero(accepted & in_window)),
        accepted_no_overlap_only=int(np.count_nonzero(accepted & no_overlap_only)),
    )


def _worker_count() -> int:
    raw = os.environ.get(_WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{_WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if workers < 1:
        raise ConfigurationError(f"{_WORKERS_ENV} must be at least 1")
    return workers


def _run_tasks(tasks: list[_BlockTask]) -> list[_BlockCounts]:
    workers = _worker_count()
    if workers == 1 or len(tasks) <= 1:
        return [_run_block(task) for task in tasks]
    with Pool(processes=min(workers, len(tasks))) as pool:
        # Block-keyed substreams make the result independent of scheduling.
        return pool.map(_run_block, tasks)


def _blocks_for(trials: int) -> list[tuple[int, int]]:
    """(block index, size) pairs covering ``trials`` in fixed-width blocks."""
    blocks = []
    done = 0
    index = 0
    while done < trials:
        size = min(_BLOCK, trials - done)
        blocks.append((index, size))
        done += size
        index += 1
    return blocks


@dataclass(frozen=True)
class StreamCounts:
    """Aggregated counts for one phase setting (one substream)."""

    trials: int
    window_passed: int
    accepted: int
    accepted_overlapping: int
    accepted_no_overlap_window: int
    accepted_no_overlap_only: int

    @property
    def acceptance(self) -> float:
        """Acceptance probability conditional on passing the window."""
        if self.window_passed == 0:
            return math.nan
        return self.accepted / self.window_passed

    @property
    def acceptance_se(self) -> float:
        if self.window_passed == 0:
            return math.nan
        q = self.acceptance
        return math.sqrt(max(q * (1.0 - q), 0.0) / self.window_passed)


def _simulate_setting(
    config: RunConfig,
    kind: int,
    stream: int,
    trials: int,
    phi1: float,
    phi2: float,
) -> StreamCounts:
    tasks = [
        _BlockTask(
            seed=config.seed,
            kind=kind,
            stream=stream,
            block=block,
            n=size,
            gamma_a=config.pair.gamma_a,
            gamma_b=config.pair.gamma_b,
            phi1=phi1,
            phi2=phi2,
            transit1=config.detector1.transit,
            transit2=config.detector2.transit,
            transit_ref=config.transit_reference,
            selection=config.selection.value,
        )
        for block, size in _blocks_for(trials)
    ]
    totals = [0, 0, 0, 0, 0]
    for counts in _run_tasks(tasks):
        totals[0] += counts.window_passed
        totals[1] += counts.accepted
        totals[2] += counts.accepted_overlapping
        totals[3] += counts.accepted_no_overlap_window
        totals[4] += counts.accepted_no_overlap_only
    return StreamCounts(
        trials=trials,
        window_passed=totals[0],
        accepted=totals[1],
        accepted_overlapping=totals[2],
        accepted_no_overlap_window=totals[3],
        accepted_no_overlap_only=totals[4],
    )


@dataclass(frozen=True)
class FringePoint:
    """Empirical acceptance at one phase offset of the fringe scan."""

    offset: float
    phi1: float
    phi2: float
    counts: StreamCounts

    @property
    def delta_phi(self) -> float:
        return self.phi2 - self.phi1


@dataclass(frozen=True)
class FringeScan:
    """Fringe of conditional acceptance vs detector phase difference.

    Point 0 carries offset 0, i.e. the configured detector pair itself.
    """

    points: tuple[FringePoint, ...]


def fringe_scan(config: RunConfig) -> FringeScan:
    """Scan the detector-2 phase over a full turn in ``fringe_points`` steps.

    The configured trials are split as evenly as possible across the points;
    each point draws from its own substream keyed by the point index.
    """
    n_points = config.fringe_points
    base, remainder = divmod(config.trials, n_points)
    points = []
    for k in range(n_points):
        trials_k = base + (1 if k < remainder else 0)
        if trials_k == 0:
            raise ConfigurationError(
                f"trials={config.trials} cannot cover {n_points} fringe points"
            )
        offset = 2.0 * math.pi * k / n_points
        phi2 = config.detector2.phase + offset
        counts = _simulate_setting(
            config, _KIND_FRINGE, k, trials_k, config.detector1.phase, phi2
        )
        points.append(
            FringePoint(offset=offset, phi1=config.detector1.phase, phi2=phi2, counts=counts)
        )
    return FringeScan(points=tuple(points))


def report_from_fringe(config: RunConfig, fringe: FringeScan) -> EstimateReport:
    """Derive the run's point estimates from a completed fringe scan."""
    accepted_total = sum(p.counts.accepted for p in fringe.points)
    point0 = fringe.points[0]
    if accepted_total == 0:
        return EstimateReport(
            trials=config.trials,
            accepted_trials=0,
            g2_estimate=math.nan,
            visibility_estimate=math.nan,
            standard_error=math.nan,
            zero_acceptance=True,
        )
    rates = [p.counts.acceptance for p in fringe.points if p.counts.window_passed > 0]
    high, low = max(rates), min(rates)
    visibility = (high - low) / (high + low) if (high + low) > 0.0 else math.nan
    return EstimateReport(
        trials=config.trials,
        accepted_trials=accepted_total,
        g2_estimate=point0.counts.acceptance,
        visibility_estimate=visibility,
        standard_error=point0.counts.acceptance_se,
    )


def run(config: RunConfig) -> EstimateReport:
    """Full seeded run: fringe scan plus derived estimates.

    Deterministic for a fixed seed, including under worker parallelism.
    """
    return report_from_fringe(config, fringe_scan(config))


def ch74_empirical(config: RunConfig, settings: BellSettings) -> EstimateReport:
    """Estimate the canceled CH74 value from four sub-runs sharing timing cuts.

    The trials are split evenly over the setting pairs (1,2), (1,2'), (1',2),
    (1',2'); each sub-run estimates the window-conditional acceptance, and the
    canceled value is q12 - q12' + q1'2 + q1'2' - 2 with errors propagated in
    quadrature.
    """
    if config.trials < 4:
        raise ConfigurationError("ch74 estimation needs at least 4 trials")
    per_setting = config.trials // 4
    setting_pairs = (
        (settings.phi1, settings.phi2),
        (settings.phi1, settings.phi2p),
        (settings.phi1p, settings.phi2),
        (settings.phi1p, settings.phi2p),
    )
    counts = [
        _simulate_setting(config, _KIND_CH74, index, per_setting, phi_i, phi_j)
        for index, (phi_i, phi_j) in enumerate(setting_pairs)
    ]
    accepted_total = sum(c.accepted for c in counts)
    if any(c.window_passed == 0 for c in counts):
        return EstimateReport(
            trials=config.trials,
            accepted_trials=accepted_total,
            g2_estimate=None,
            visibility_estimate=None,
            standard_error=math.nan,
            ch74_estimate=math.nan,
            zero_acceptance=True,
        )
    q = [c.acceptance for c in counts]
    value = q[0] - q[1] + q[2] + q[3] - 2.0
    variance = sum(c.acceptance_se**2 for c in counts)
    return EstimateReport(
        trials=config.trials,
        accepted_trials=accepted_total,
        g2_estimate=None,
        visibility_estimate=None,
        standard_error=math.sqrt(variance),
        ch74_estimate=value,
    )


def collect_clicks(config: RunConfig, max_trials: int | None = None) -> list[CycleResult]:
    """Materialize per-cycle click records (dedicated substream).

    Intended for exports and statistical tests; capped by ``max_trials`` so
    large runs do not have to hold every event in memory.
    """
    n = config.trials if max_trials is None else min(config.trials, max_trials)
    results = []
    rng = None
    for trial in range(n):
        if trial % _BLOCK == 0:
            rng = _block_rng(config.seed, _KIND_CLICKS, 0, trial // _BLOCK)
        results.append(simulate_cycle(rng, config, trial=trial))
    return results
