import math

import pytest
from fastapi.testclient import TestClient

from twophoton import TimingRecord, g2_analytic
from twophoton.service.app import app
from twophoton.service.schemas import RunConfigSpec, build_detectors, build_pair

from conftest import base_config_dict

SQRT2_MINUS_1 = math.sqrt(2.0) - 1.0


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


class TestHealth:
    def test_health(self, client):
        response = client.get("/api/health")
        assert response.status_code == 200
        assert response.json()["status"] == "ok"


class TestG2Scan:
    def test_rows_match_direct_evaluation(self, client):
        config = base_config_dict(scan={"points": 8})
        response = client.post("/api/g2-scan", json={"config": config})
        assert response.status_code == 200
        rows = response.json()["rows"]
        assert len(rows) == 8

        spec = RunConfigSpec.model_validate(config)
        pair = build_pair(spec.geometry)
        d1, d2 = build_detectors(spec.geometry, pair)[:2]
        timing = TimingRecord(t1=d1.transit, t2=d2.transit, transit1=d1.transit, transit2=d2.transit)
        for row in rows:
            expected = g2_analytic(pair, row["phi1"], row["phi2"], timing)
            assert row["g2"] == pytest.approx(expected, rel=1e-12)
            assert row["mode"] == "single_envelope"

    def test_mode_override(self, client):
        config = base_config_dict(scan={"points": 4})
        response = client.post("/api/g2-scan", json={"config": config, "mode": "dual_envelope"})
        assert response.status_code == 200
        assert all(row["mode"] == "dual_envelope" for row in response.json()["rows"])


class TestVisibility:
    def test_equal_rates_give_unity(self, client):
        response = client.post("/api/visibility", json={"config": base_config_dict()})
        assert response.status_code == 200
        assert response.json()["visibility"] == 1.0

    def test_literal_mode_for_unequal_rates(self, client):
        config = base_config_dict()
        config["geometry"]["gamma_a"] = 40e6
        config["timing"] = {"t1": 4e-9, "t2": 14e-9}
        response = client.post("/api/visibility", json={"config": config})
        assert response.status_code == 200
        body = response.json()
        exponent = (body["gamma_a"] - body["gamma_b"]) * (4e-9 - 14e-9)
        assert body["visibility"] == pytest.approx(math.exp(exponent), rel=1e-12)


class TestBellTest:
    def test_default_settings_violate(self, client):
        response = client.post("/api/bell-test", json={"config": base_config_dict()})
        assert response.status_code == 200
        body = response.json()
        assert body["value"] == pytest.approx(SQRT2_MINUS_1, abs=1e-9)
        assert body["violated"] is True
        assert body["lower_bound"] == -1.0
        assert body["upper_bound"] == 0.0

    def test_no_overlap_timing_classification(self, client):
        config = base_config_dict()
        transit = 1.0 / 299792458.0
        config["bell"] = {"t10": transit, "t20": transit + 5e-9}
        response = client.post("/api/bell-test", json={"config": config})
        assert response.status_code == 200
        assert response.json()["causality"] == "no_overlap_and_no_signaling"
        assert response.json()["violated"] is True


class TestBellScan:
    def test_coarse_grid_summary_and_points(self, client):
        axis = {"start_deg": 0.0, "stop_deg": 360.0, "step_deg": 45.0}
        config = base_config_dict(bell_scan={"d12": axis, "d12p": axis, "d1p2": axis})
        response = client.post("/api/bell-scan", json={"config": config})
        assert response.status_code == 200
        body = response.json()
        assert body["n_points"] == 8**3
        assert len(body["results"]) == 8**3
        assert body["max_value"] <= SQRT2_MINUS_1 + 1e-9
        assert body["max_value"] == pytest.approx(
            max(point["value"] for point in body["results"]), rel=1e-12
        )


class TestMcRun:
    def test_small_run_with_overrides(self, client):
        config = base_config_dict()
        config["geometry"]["detectors"][1]["xi"] = 0.0  # bright fringe at the pair
        response = client.post(
            "/api/mc-run", json={"config": config, "seed": 11, "trials": 24_000}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["trials"] == 24_000
        assert body["seed"] == 11
        assert body["g2_estimate"] == 1.0
        assert body["visibility_estimate"] == 1.0
        assert len(body["fringe"]) == 24
        assert not body["zero_acceptance"]

    def test_zero_acceptance_serializes_as_null(self, client):
        config = base_config_dict(
            montecarlo={"trials": 2000, "seed": 8, "selection": "no_overlap_and_no_signaling"}
        )
        # transit far beyond the lifetime: the window can never be reached
        config["geometry"]["detectors"] = [
            {"distance": 2.0e5, "xi": 0.0},
            {"distance": 2.0e5, "xi": 0.0},
        ]
        response = client.post("/api/mc-run", json={"config": config})
        assert response.status_code == 200
        body = response.json()
        assert body["zero_acceptance"] is True
        assert body["g2_estimate"] is None
        assert body["visibility_estimate"] is None

    def test_ch74_empirical_endpoint(self, client):
        config = base_config_dict(montecarlo={"trials": 100_000, "seed": 3})
        response = client.post("/api/ch74-empirical", json={"config": config})
        assert response.status_code == 200
        body = response.json()
        assert body["ch74_estimate"] == pytest.approx(
            SQRT2_MINUS_1, abs=3.0 * body["standard_error"]
        )
        assert body["fringe"] == []


class TestTimingCheck:
    def test_reference_ion_parameters(self, client):
        config = base_config_dict(timing_check={"requested_delay": 5e-9})
        response = client.post("/api/timing-check", json={"config": config})
        assert response.status_code == 200
        body = response.json()
        assert body["lifetime_s"] == pytest.approx(7.957747154594767e-09, rel=1e-12)
        assert body["transit_s"] == pytest.approx(3.3356409519815204e-09, rel=1e-12)
        assert body["classification"] == "no_overlap_and_no_signaling"


class TestErrorHandling:
    def test_far_field_violation_is_422(self, client):
        config = base_config_dict()
        config["geometry"]["separation"] = 1e-6  # equal to the wavelength
        response = client.post("/api/bell-test", json={"config": config})
        assert response.status_code == 422
        assert response.json()["error"]["type"] == "configuration"

    def test_schema_violation_is_422(self, client):
        config = base_config_dict()
        del config["geometry"]["wavelength"]
        response = client.post("/api/bell-test", json={"config": config})
        assert response.status_code == 422

    def test_unequal_rates_rejected_for_bell_test(self, client):
        config = base_config_dict()
        config["geometry"]["gamma_b"] = 30e6
        response = client.post("/api/bell-test", json={"config": config})
        assert response.status_code == 422
        assert "equal decay rates" in response.json()["error"]["message"]
