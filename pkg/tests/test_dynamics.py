import cmath
import math

import numpy as np
import pytest

from twophoton import (
    AtomState,
    CorrelatorQuery,
    evolve,
    evolve_numeric,
    regression_oracle,
    two_time_correlator,
)


def random_state(rng):
    # random pure-ish state mixed with identity keeps eigenvalues positive
    excited = rng.uniform(0.0, 1.0)
    max_coh = math.sqrt(excited * (1.0 - excited))
    coherence = rng.uniform(0.0, 0.9) * max_coh * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    return AtomState.from_populations(excited, coherence)


class TestAtomState:
    def test_valid_state_accepted(self):
        state = AtomState.from_populations(0.5, 0.5)
        assert state.excited_population == pytest.approx(0.5)

    def test_trace_violation_rejected(self):
        with pytest.raises(ValueError, match="trace"):
            AtomState(np.diag([0.6, 0.6]))

    def test_hermiticity_violation_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            AtomState(np.array([[0.5, 0.3], [0.1, 0.5]]))

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(ValueError, match="eigenvalue"):
            AtomState(np.array([[0.5, 0.6], [0.6, 0.5]]))


class TestEvolve:
    def test_zero_time_is_identity(self):
        state = AtomState.from_populations(1.0)
        evolved = evolve(state, gamma=1.0, omega=5.0, t=0.0)
        assert np.allclose(evolved.rho, state.rho)

    def test_population_decay(self):
        state = AtomState.from_populations(1.0)
        evolved = evolve(state, gamma=1.0, omega=0.0, t=0.5)
        assert evolved.excited_population == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_coherence_decay_and_rotation_matches_integrator(self):
        state = AtomState.from_populations(0.5, 0.5)
        gamma, omega, t = 1.0, 10.0, 0.3
        evolved = evolve(state, gamma, omega, t)
        assert abs(evolved.coherence) == pytest.approx(0.5 * math.exp(-0.3), rel=1e-12)
        assert cmath.phase(evolved.coherence) == pytest.approx(-3.0, rel=1e-12)
        numeric = evolve_numeric(state, gamma, omega, t)
        assert np.max(np.abs(evolved.rho - numeric)) < 1e-8

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            evolve(AtomState.from_populations(1.0), 1.0, 0.0, -0.1)

    def test_integrator_preserves_trace_and_hermiticity(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            state = random_state(rng)
            gamma = rng.uniform(0.2, 5.0)
            t = rng.uniform(0.0, 20.0 / gamma)
            numeric = evolve_numeric(state, gamma, rng.uniform(0.0, 50.0), t)
            assert abs(np.trace(numeric) - 1.0) < 1e-10
            assert np.max(np.abs(numeric - numeric.conj().T)) < 1e-10


class TestTwoTimeCorrelator:
    def test_equal_times_zero(self):
        q = CorrelatorQuery(gamma=1.0, omega=0.0, t_i=0.0, t_j=0.0, initial_excited_population=1.0)
        assert two_time_correlator(q) == 1.0 + 0.0j

    def test_unit_delay_decay(self):
        q = CorrelatorQuery(gamma=1.0, omega=0.0, t_i=0.0, t_j=1.0)
        assert two_time_correlator(q) == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_magnitude_and_phase(self):
        q = CorrelatorQuery(gamma=0.5, omega=2.0, t_i=0.2, t_j=0.7)
        value = two_time_correlator(q)
        assert abs(value) == pytest.approx(math.exp(-0.45), rel=1e-12)
        assert cmath.phase(value) == pytest.approx(1.0, rel=1e-12)
        assert abs(value - regression_oracle(q)) < 1e-8

    def test_unordered_times_rejected(self):
        with pytest.raises(ValueError, match="ordered"):
            CorrelatorQuery(gamma=1.0, omega=0.0, t_i=1.0, t_j=0.5)

    def test_magnitude_nonincreasing_in_t_j(self):
        magnitudes = [
            abs(two_time_correlator(CorrelatorQuery(gamma=0.8, omega=30.0, t_i=0.4, t_j=t_j)))
            for t_j in np.linspace(0.4, 6.0, 50)
        ]
        assert all(later <= earlier for earlier, later in zip(magnitudes, magnitudes[1:]))


class TestRegressionOracle:
    def test_matches_closed_form_on_reference_points(self):
        queries = [
            CorrelatorQuery(gamma=1.0, omega=0.0, t_i=0.0, t_j=0.0),
            CorrelatorQuery(gamma=1.0, omega=0.0, t_i=0.0, t_j=1.0),
            CorrelatorQuery(gamma=0.5, omega=2.0, t_i=0.2, t_j=0.7),
        ]
        for q in queries:
            assert abs(regression_oracle(q) - two_time_correlator(q)) < 1e-8

    def test_unitary_limit_is_pure_phase(self):
        q = CorrelatorQuery(gamma=0.0, omega=5.0, t_i=0.3, t_j=1.1, initial_excited_population=0.7)
        value = regression_oracle(q)
        assert value == pytest.approx(0.7 * cmath.exp(5j * 0.8), abs=1e-8)

    def test_equal_times_give_decayed_population(self):
        q = CorrelatorQuery(gamma=2.0, omega=40.0, t_i=0.25, t_j=0.25, initial_excited_population=0.9)
        value = regression_oracle(q)
        assert value.imag == pytest.approx(0.0, abs=1e-10)
        assert value.real == pytest.approx(0.9 * math.exp(-1.0), abs=1e-8)

    def test_randomized_agreement_with_closed_form(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            t_i, t_j = sorted(rng.uniform(0.0, 5.0, size=2))
            q = CorrelatorQuery(
                gamma=rng.uniform(0.1, 10.0),
                omega=rng.uniform(0.0, 100.0),
                t_i=t_i,
                t_j=t_j,
                initial_excited_population=rng.uniform(0.0, 1.0),
            )
            assert abs(regression_oracle(q) - two_time_correlator(q)) < 1e-8
