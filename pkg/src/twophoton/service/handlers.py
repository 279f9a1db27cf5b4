"""Service layer: validated request models in, response models out.

The FastAPI endpoints and the CLI both call these functions, so local and
remote execution share one code path.
"""

from __future__ import annotations

import math

import numpy as np

from ..bell import bell_scan, causality_window_check, ch74_functional, classify_delay
from ..correlations import G2Mode, TimingRecord, g2_amplitude_oracle, g2_analytic, visibility
from ..montecarlo import (
    EstimateReport,
    FringeScan,
    ch74_empirical,
    collect_clicks,
    fringe_scan,
    report_from_fringe,
)
from . import schemas as sc


def _finite_or_none(value: float | None) -> float | None:
    if value is None or math.isnan(value):
        return None
    return value


def handle_g2_scan(request: sc.G2ScanRequest) -> sc.G2ScanResponse:
    config = request.config
    pair = sc.build_pair(config.geometry)
    d1, d2 = sc.require_two_detectors(sc.build_detectors(config.geometry, pair))
    mode = G2Mode(request.mode if request.mode is not None else config.montecarlo.mode)

    t1 = config.timing.t1 if config.timing.t1 is not None else d1.transit
    t2 = config.timing.t2 if config.timing.t2 is not None else d2.transit
    timing = TimingRecord(t1=t1, t2=t2, transit1=d1.transit, transit2=d2.transit)
    phi1 = config.scan.phi1 if config.scan.phi1 is not None else d1.phase

    phi2_values = np.linspace(config.scan.start, config.scan.stop, config.scan.points, endpoint=False)
    rows = []
    for phi2 in phi2_values:
        if mode is G2Mode.SINGLE_ENVELOPE:
            value = g2_analytic(pair, phi1, float(phi2), timing)
        else:
            value = g2_amplitude_oracle(pair, phi1, float(phi2), timing)
        rows.append(
            sc.G2ScanRow(phi1=phi1, phi2=float(phi2), t1=t1, t2=t2, g2=value, mode=mode.value)
        )
    return sc.G2ScanResponse(rows=rows)


def handle_visibility(request: sc.VisibilityRequest) -> sc.VisibilityResponse:
    config = request.config
    pair = sc.build_pair(config.geometry)
    d1, d2 = sc.require_two_detectors(sc.build_detectors(config.geometry, pair))
    mode = G2Mode(request.mode if request.mode is not None else config.montecarlo.mode)
    transit = sc.shared_transit(d1, d2)
    t1 = config.timing.t1 if config.timing.t1 is not None else transit
    t2 = config.timing.t2 if config.timing.t2 is not None else transit
    value = visibility(pair, t1, t2, transit=transit, mode=mode)
    return sc.VisibilityResponse(
        visibility=value, mode=mode.value, t1=t1, t2=t2,
        gamma_a=pair.gamma_a, gamma_b=pair.gamma_b,
    )


def handle_bell_test(request: sc.BellTestRequest) -> sc.BellTestResponse:
    settings = sc.build_bell_settings(request.config)
    result = ch74_functional(settings)
    if settings.transit > 0.0:
        causality = causality_window_check(settings.t10, settings.t20, settings.transit).value
    else:
        causality = classify_delay(settings.t20 - settings.t10, settings.transit).value
    return sc.BellTestResponse(
        value=result.value,
        lower_bound=result.lower_bound,
        upper_bound=result.upper_bound,
        violated=result.violated,
        margin=result.margin,
        raw_value=result.raw_value,
        time_factor=result.time_factor,
        causality=causality,
        deltas=result.deltas,
    )


def handle_bell_scan(request: sc.BellScanRequest) -> sc.BellScanResponse:
    config = request.config
    settings = sc.build_bell_settings(config)
    report = bell_scan(
        gamma=settings.gamma,
        transit=settings.transit,
        grid=config.bell_scan.to_grid(),
        t10=settings.t10,
        t20=settings.t20,
        max_kept=config.bell_scan.max_kept,
    )

    def to_point(result) -> sc.BellScanPoint:
        d12, d12p, d1p2, d1p2p = result.deltas
        return sc.BellScanPoint(
            d12=d12, d12p=d12p, d1p2=d1p2, d1p2p=d1p2p,
            value=result.value, violated=result.violated,
        )

    return sc.BellScanResponse(
        max_value=report.max_value,
        best=to_point(report.best),
        n_points=report.n_points,
        n_violations=report.n_violations,
        results=[to_point(r) for r in report.results] if report.results is not None else None,
    )


def _mc_response(run_config, report: EstimateReport, fringe: FringeScan | None) -> sc.McRunResponse:
    points = [
        sc.FringePointModel(
            delta_phi=p.delta_phi,
            trials=p.counts.trials,
            window_passed=p.counts.window_passed,
            accepted=p.counts.accepted,
            acceptance=_finite_or_none(p.counts.acceptance),
        )
        for p in (fringe.points if fringe is not None else ())
    ]
    return sc.McRunResponse(
        trials=report.trials,
        accepted_trials=report.accepted_trials,
        g2_estimate=_finite_or_none(report.g2_estimate),
        visibility_estimate=_finite_or_none(report.visibility_estimate),
        standard_error=_finite_or_none(report.standard_error),
        ch74_estimate=_finite_or_none(report.ch74_estimate),
        zero_acceptance=report.zero_acceptance,
        seed=run_config.seed,
        selection=run_config.selection.value,
        mode=run_config.mode.value,
        fringe=points,
    )


def handle_mc_run(request: sc.McRunRequest) -> sc.McRunResponse:
    run_config = sc.build_run_config(
        request.config, seed=request.seed, trials=request.trials, mode=request.mode
    )
    fringe = fringe_scan(run_config)
    report = report_from_fringe(run_config, fringe)
    return _mc_response(run_config, report, fringe)


def handle_ch74_empirical(request: sc.McRunRequest) -> sc.McRunResponse:
    """Empirical CH74 estimate at the config's bell settings."""
    run_config = sc.build_run_config(
        request.config, seed=request.seed, trials=request.trials, mode=request.mode
    )
    settings = sc.build_bell_settings(request.config)
    report = ch74_empirical(run_config, settings)
    return _mc_response(run_config, report, None)


def handle_timing_check(request: sc.TimingCheckRequest) -> sc.TimingCheckResponse:
    config = request.config
    pair = sc.build_pair(config.geometry)
    detectors = sc.build_detectors(config.geometry, pair)
    gamma = sc.require_equal_gammas(pair, "the timing check")
    lifetime = 1.0 / (2.0 * gamma)
    transits = [d.transit for d in detectors]
    transit = sum(transits) / len(transits)
    delay = config.timing_check.requested_delay
    classification = classify_delay(delay, transit).value if delay is not None else None
    return sc.TimingCheckResponse(
        gamma_amplitude_per_s=gamma,
        lifetime_s=lifetime,
        transits_s=transits,
        transit_s=transit,
        window_low_s=transit,
        window_high_s=2.0 * transit,
        requested_delay_s=delay,
        classification=classification,
    )


def click_rows(request: sc.McRunRequest, max_trials: int) -> list[sc.ClickRow]:
    """Materialized click stream for CSV export (times in nanoseconds)."""
    run_config = sc.build_run_config(
        request.config, seed=request.seed, trials=request.trials, mode=request.mode
    )
    rows = []
    for cycle in collect_clicks(run_config, max_trials=max_trials):
        for click in cycle.clicks:
            rows.append(
                sc.ClickRow(
                    trial=click.trial,
                    detector=click.detector,
                    detection_time_ns=click.detection_time * 1e9,
                    emission_time_ns=click.emission_time * 1e9,
                    phase_setting_rad=click.phase_setting,
                    accepted=cycle.accepted,
                )
            )
    return rows
