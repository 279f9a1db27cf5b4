import numpy as np
import pytest

from twophoton import DetectorSetting, EmitterPair, FarFieldPolicy

# Relaxed thresholds for tests that deliberately probe small layouts.
RELAXED = FarFieldPolicy(min_detector_ratio=0.0, min_separation_ratio=0.0)

GAMMA_16NS = 1.0 / 16e-9  # amplitude decay constant, population lifetime 8 ns


def make_pair(gamma_a=1.0, gamma_b=None, separation=10e-6, wavelength=1e-6):
    return EmitterPair.from_separation(
        separation=separation,
        wavelength=wavelength,
        gamma_a=gamma_a,
        gamma_b=gamma_b if gamma_b is not None else gamma_a,
    )


def detector_at(pair, xi, distance=1.0):
    return DetectorSetting.from_angle(pair, distance, xi)


@pytest.fixture
def pair():
    """Equal-rate pair: d = 10 um, lambda = 1 um, gamma = 1 (unit time)."""
    return make_pair(gamma_a=1.0)


@pytest.fixture
def ns_pair():
    """Pair with the 8 ns population lifetime used by the timing scenarios."""
    return make_pair(gamma_a=GAMMA_16NS)


@pytest.fixture(autouse=True)
def _no_worker_env(monkeypatch):
    # Tests control worker parallelism explicitly.
    monkeypatch.delenv("TWOPHOTON_WORKERS", raising=False)


def base_config_dict(**overrides):
    """Minimal valid run config as a plain dict (for CLI/service tests)."""
    config = {
        "geometry": {
            "separation": 1e-5,
            "wavelength": 1e-6,
            "gamma_a": 20e6,
            "gamma_b": 20e6,
            "gamma_unit": "linewidth_hz",
            "detectors": [
                {"distance": 1.0, "xi": 0.0},
                {"distance": 1.0, "xi": 0.05},
            ],
        }
    }
    config.update(overrides)
    return config


def random_unit_vectors(rng, n):
    vecs = rng.normal(size=(n, 3))
    return vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
