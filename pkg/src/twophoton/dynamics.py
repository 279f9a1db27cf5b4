"""Single-emitter open-system evolution and delayed dipole correlators.

A freely decaying two-level emitter has a closed-form solution: the excited
population falls as exp(-2*gamma*t) and the optical coherence as
exp(-(i*omega + gamma)*t). The delayed correlator <raise(t_j) lower(t_i)>
factorizes into that population times a one-sided decay-and-rotation factor.
Both closed forms are validated here by integrating the master equation
directly, which extends linearly to the non-Hermitian matrices propagated by
the regression rule.

Basis ordering is {excited, ground}; ``lower`` maps excited to ground.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .constants import ODE_ATOL, ODE_RTOL
from .errors import NumericalError

LOWER = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |g><e|
RAISE = LOWER.conj().T  # |e><g|
PROJ_EXCITED = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
S_Z = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)

_HERMITICITY_TOL = 1e-12
_TRACE_TOL = 1e-12
_POSITIVITY_TOL = -1e-12


@dataclass(frozen=True, eq=False)
class AtomState:
    """2x2 density matrix in the {excited, ground} basis.

    Construction validates Hermiticity, unit trace and positivity (each to
    1e-12), so every instance is a physical state.
    """

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > _HERMITICITY_TOL:
            raise ValueError("density matrix is not Hermitian to 1e-12")
        if abs(np.trace(rho) - 1.0) > _TRACE_TOL:
            raise ValueError("density matrix trace differs from 1 by more than 1e-12")
        if float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)))) < _POSITIVITY_TOL:
            raise ValueError("density matrix has an eigenvalue below -1e-12")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_populations(cls, excited: float, coherence: complex = 0.0j) -> "AtomState":
        """State with the given excited population and e-g coherence."""
        return cls(np.array([[excited, coherence], [np.conj(coherence), 1.0 - excited]]))

    @property
    def excited_population(self) -> float:
        return float(self.rho[0, 0].real)

    @property
    def coherence(self) -> complex:
        """The e-g off-diagonal element."""
        return complex(self.rho[0, 1])


def master_equation_rhs(matrix: np.ndarray, gamma: float, omega: float) -> np.ndarray:
    """Generator of free decay applied to an arbitrary 2x2 matrix.

    Hamiltonian part -i*omega*[S_z, m] plus the decay dissipator; valid for
    density matrices and for the non-Hermitian matrices that appear in
    two-time correlators.
    """
    commutator = S_Z @ matrix - matrix @ S_Z
    decay = PROJ_EXCITED @ matrix + matrix @ PROJ_EXCITED - 2.0 * (LOWER @ matrix @ RAISE)
    return -1j * omega * commutator - gamma * decay


def _integrate(
    matrix: np.ndarray,
    gamma: float,
    omega: float,
    t_start: float,
    t_end: float,
    rtol: float = ODE_RTOL,
    atol: float = ODE_ATOL,
) -> np.ndarray:
    """Propagate a 2x2 complex matrix with the decay generator."""
    if t_end == t_start:
        return np.array(matrix, dtype=complex)

    def rhs(_t, y):
        m = (y[:4] + 1j * y[4:]).reshape(2, 2)
        dm = master_equation_rhs(m, gamma, omega)
        return np.concatenate([dm.real.ravel(), dm.imag.ravel()])

    m0 = np.asarray(matrix, dtype=complex)
    y0 = np.concatenate([m0.real.ravel(), m0.imag.ravel()])
    sol = solve_ivp(rhs, (t_start, t_end), y0, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise NumericalError(
            f"master-equation integration failed: {sol.message} "
            f"(nfev={sol.nfev}, span=({t_start:.6g}, {t_end:.6g}))"
        )
    y = sol.y[:, -1]
    return (y[:4] + 1j * y[4:]).reshape(2, 2)


def evolve(state: AtomState, gamma: float, omega: float, t: float) -> AtomState:
    """Closed-form free decay of a state for a time t >= 0.

    The excited population is multiplied by exp(-2*gamma*t) and the coherence
    by exp(-(i*omega + gamma)*t); the ground population absorbs the loss.
    """
    if t < 0.0:
        raise ValueError("evolution time must be nonnegative")
    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    excited = state.rho[0, 0] * math.exp(-2.0 * gamma * t)
    coherence = state.rho[0, 1] * cmath.exp((-1j * omega - gamma) * t)
    rho = np.array([[excited, coherence], [np.conj(coherence), 1.0 - excited]])
    return AtomState(rho)


def evolve_numeric(
    state: AtomState,
    gamma: float,
    omega: float,
    t: float,
    rtol: float = ODE_RTOL,
    atol: float = ODE_ATOL,
) -> np.ndarray:
    """Master-equation integration oracle for :func:`evolve`.

    Returns the raw integrated matrix (not an AtomState) so tests can measure
    how well the integrator preserves trace and Hermiticity.
    """
    if t < 0.0:
        raise ValueError("evolution time must be nonnegative")
    return _integrate(state.rho, gamma, omega, 0.0, t, rtol=rtol, atol=atol)


@dataclass(frozen=True)
class CorrelatorQuery:
    """Inputs for the delayed dipole correlator <raise(t_j) lower(t_i)>.

    ``initial_excited_population`` is the excited population at t = 0; the
    initial state carries no coherence.
    """

    gamma: float
    omega: float
    t_i: float
    t_j: float
    initial_excited_population: float = 1.0

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        if not 0.0 <= self.initial_excited_population <= 1.0:
            raise ValueError("initial excited population must lie in [0, 1]")
        if self.t_i < 0.0:
            raise ValueError("t_i must be nonnegative")
        if self.t_j < self.t_i:
            raise ValueError("times must be ordered: t_j >= t_i")


def two_time_correlator(query: CorrelatorQuery) -> complex:
    """Closed-form delayed correlator.

    exp((i*omega - gamma)*(t_j - t_i)) * p0 * exp(-2*gamma*t_i); its magnitude
    never exceeds the initial excited population.
    """
    delay_factor = cmath.exp((1j * query.omega - query.gamma) * (query.t_j - query.t_i))
    population = query.initial_excited_population * math.exp(-2.0 * query.gamma * query.t_i)
    return delay_factor * population


def regression_oracle(
    query: CorrelatorQuery,
    rtol: float = ODE_RTOL,
    atol: float = ODE_ATOL,
) -> complex:
    """Same correlator via numerical integration and the regression rule.

    The density matrix is integrated to t_i, the lowering operator applied,
    and the resulting matrix propagated with the same generator to t_j; the
    correlator is the trace against the raising operator. Independent of the
    closed form in :func:`two_time_correlator`.
    """
    p0 = query.initial_excited_population
    rho0 = np.array([[p0, 0.0], [0.0, 1.0 - p0]], dtype=complex)
    rho_ti = _integrate(rho0, query.gamma, query.omega, 0.0, query.t_i, rtol=rtol, atol=atol)
    lowered = LOWER @ rho_ti
    propagated = _integrate(lowered, query.gamma, query.omega, query.t_i, query.t_j, rtol=rtol, atol=atol)
    return complex(np.trace(RAISE @ propagated))
