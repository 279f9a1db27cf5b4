"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
pass/fail lines.
"""

import json
import math
import time

import numpy as np
from click.testing import CliRunner

from twophoton import (
    BellGrid,
    BellSettings,
    CorrelatorQuery,
    PhaseAxis,
    RunConfig,
    SelectionRule,
    TimingRecord,
    VIOLATION_PHASES,
    bell_scan,
    ch74_empirical,
    ch74_functional,
    ch74_value,
    fringe_scan,
    g2_amplitude_oracle,
    g2_analytic,
    regression_oracle,
    run,
    two_time_correlator,
    visibility,
)
from twophoton.cli import main
from twophoton.montecarlo import report_from_fringe

from conftest import GAMMA_16NS, base_config_dict, detector_at, make_pair

SQRT2_MINUS_1 = math.sqrt(2.0) - 1.0
TRANSIT_1M = 3.3356409519815204e-09


def _verdict(number: int, description: str, passed: bool) -> None:
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {description}")
    assert passed, f"criterion {number} failed: {description}"


def test_criterion_1_visibility_unity():
    pair = make_pair(gamma_a=GAMMA_16NS)
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for index in range(100):
        t1 = TRANSIT_1M + rng.exponential(16e-9)
        # every other pair puts the second detection beyond the transit time
        gap = rng.uniform(1.0, 10.0) * TRANSIT_1M if index % 2 else rng.uniform(0.0, 1.0) * TRANSIT_1M
        value = visibility(pair, t1, t1 + gap, transit=TRANSIT_1M)
        worst = max(worst, abs(value - 1.0))
    elapsed = time.perf_counter() - start
    _verdict(
        1,
        f"equal-rate visibility deviates by {worst:.3g} (<= 1e-12) over 100 timings in {elapsed:.3f}s",
        worst <= 1e-12 and elapsed < 1.0,
    )


def test_criterion_2_ch74_violation():
    phi1, phi1p, phi2, phi2p = VIOLATION_PHASES
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    tuple_value = ch74_value(math.pi / 4, 3 * math.pi / 4, math.pi / 4, math.pi / 4)
    all_ok = abs(tuple_value - SQRT2_MINUS_1) <= 1e-9
    for index in range(50):
        t10 = TRANSIT_1M + rng.uniform(0.0, 5.0) / GAMMA_16NS
        gap = (
            rng.uniform(1.0, 1.9) * TRANSIT_1M  # inside the no-overlap window
            if index % 2
            else rng.uniform(0.0, 0.9) * TRANSIT_1M
        )
        settings = BellSettings(
            phi1=phi1, phi1p=phi1p, phi2=phi2, phi2p=phi2p,
            t10=t10, t20=t10 + gap, gamma=GAMMA_16NS, transit=TRANSIT_1M,
        )
        result = ch74_functional(settings)
        all_ok = all_ok and result.violated and abs(result.value - SQRT2_MINUS_1) <= 1e-9
    elapsed = time.perf_counter() - start
    _verdict(
        2,
        f"CH74 value sqrt(2)-1 with violated=true over 50 pinned timings in {elapsed:.3f}s",
        all_ok and elapsed < 1.0,
    )


def test_criterion_3_scan_maximum():
    one_degree = math.radians(1.0)
    grid = BellGrid(
        d12=PhaseAxis(step=one_degree),
        d12p=PhaseAxis(step=one_degree),
        d1p2=PhaseAxis(step=one_degree),
    )
    start = time.perf_counter()
    report = bell_scan(gamma=1.0, transit=0.0, grid=grid, keep_results=False)
    elapsed = time.perf_counter() - start
    below = SQRT2_MINUS_1 - report.max_value <= 1e-3
    above = report.max_value <= SQRT2_MINUS_1 + 1e-9
    _verdict(
        3,
        f"1-degree grid ({report.n_points} points) max {report.max_value:.9f} in {elapsed:.1f}s",
        below and above and elapsed < 60.0,
    )


def test_criterion_4_dynamics_oracle():
    rng = np.random.default_rng(404)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        t_i, t_j = sorted(rng.uniform(0.0, 5.0, size=2))
        query = CorrelatorQuery(
            gamma=rng.uniform(0.1, 10.0),
            omega=rng.uniform(0.0, 100.0),
            t_i=t_i,
            t_j=t_j,
            initial_excited_population=rng.uniform(0.0, 1.0),
        )
        worst = max(worst, abs(regression_oracle(query) - two_time_correlator(query)))
    elapsed = time.perf_counter() - start
    _verdict(
        4,
        f"regression oracle deviates by {worst:.3g} (<= 1e-8) over 200 queries in {elapsed:.1f}s",
        worst <= 1e-8 and elapsed < 30.0,
    )


def test_criterion_5_amplitude_oracle_equivalence():
    rng = np.random.default_rng(505)
    worst = 0.0
    for _ in range(1000):
        gamma = rng.uniform(0.1, 5.0)
        pair = make_pair(gamma_a=gamma)
        timing = TimingRecord(
            t1=rng.uniform(0.0, 3.0 / gamma), t2=rng.uniform(0.0, 3.0 / gamma)
        )
        phi1, phi2 = rng.uniform(-7.0, 7.0, size=2)
        worst = max(
            worst,
            abs(
                g2_amplitude_oracle(pair, phi1, phi2, timing)
                - g2_analytic(pair, phi1, phi2, timing)
            ),
        )
    _verdict(
        5,
        f"amplitude oracle deviates by {worst:.3g} (<= 1e-12) over 1000 equal-rate inputs",
        worst <= 1e-12,
    )


def test_criterion_6_monte_carlo_fringe():
    pair = make_pair(gamma_a=GAMMA_16NS)
    detector = detector_at(pair, 0.0)
    config = RunConfig(
        trials=1_000_000,
        seed=20260811,
        pair=pair,
        detector1=detector,
        detector2=detector,
        selection=SelectionRule.NO_OVERLAP_AND_NO_SIGNALING,
        fringe_points=24,
    )
    start = time.perf_counter()
    fringe = fringe_scan(config)
    report = report_from_fringe(config, fringe)
    elapsed = time.perf_counter() - start

    shape_ok = True
    for point in fringe.points:
        if point.counts.window_passed == 0:
            shape_ok = False
            continue
        expected = 0.5 * (1.0 + math.cos(point.delta_phi))
        bound = 4.0 / math.sqrt(point.counts.window_passed)
        shape_ok = shape_ok and abs(point.counts.acceptance - expected) <= bound
    visibility_ok = abs(report.visibility_estimate - 1.0) <= 0.01
    reproducible = run(config) == report
    _verdict(
        6,
        "1e6-trial windowed fringe: visibility "
        f"{report.visibility_estimate:.4f}, fringe follows (1+cos)/2, "
        f"bit-reproducible, {elapsed:.1f}s",
        shape_ok and visibility_ok and reproducible and elapsed < 120.0,
    )


def test_criterion_7_empirical_ch74():
    pair = make_pair(gamma_a=GAMMA_16NS)
    detector = detector_at(pair, 0.0)
    config = RunConfig(
        trials=4_000_000,
        seed=777,
        pair=pair,
        detector1=detector,
        detector2=detector,
        selection=SelectionRule.NO_OVERLAP_AND_NO_SIGNALING,
    )
    phi1, phi1p, phi2, phi2p = VIOLATION_PHASES
    settings = BellSettings(
        phi1=phi1, phi1p=phi1p, phi2=phi2, phi2p=phi2p,
        t10=detector.transit, t20=detector.transit,
        gamma=GAMMA_16NS, transit=detector.transit,
    )
    start = time.perf_counter()
    report = ch74_empirical(config, settings)
    elapsed = time.perf_counter() - start
    deviation = abs(report.ch74_estimate - SQRT2_MINUS_1)
    _verdict(
        7,
        f"empirical CH74 {report.ch74_estimate:.5f} +- {report.standard_error:.5f} "
        f"({deviation / report.standard_error:.2f} SE from sqrt(2)-1) in {elapsed:.1f}s",
        deviation <= 3.0 * report.standard_error and elapsed < 300.0,
    )


def test_criterion_8_footnote_arithmetic(tmp_path):
    config = base_config_dict(timing_check={"requested_delay": 5e-9})
    path = tmp_path / "ion.json"
    path.write_text(json.dumps(config))
    result = CliRunner().invoke(main, ["timing-check", "--config", str(path)])
    body = json.loads(result.stdout)
    lifetime_ns = body["lifetime_s"] * 1e9
    transit_ns = body["transit_s"] * 1e9
    ok = (
        result.exit_code == 0
        and abs(lifetime_ns - 8.0) <= 0.5
        and abs(transit_ns - 3.0) <= 0.5
        and abs(transit_ns - 3.3) <= 0.5
        and body["classification"] == "no_overlap_and_no_signaling"
    )
    _verdict(
        8,
        f"timing-check reports lifetime {lifetime_ns:.2f} ns and transit {transit_ns:.2f} ns",
        ok,
    )
