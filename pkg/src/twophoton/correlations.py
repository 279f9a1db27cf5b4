"""Joint two-photon detection statistics for the emitter pair.

Closed-form coincidence densities and their fringe visibility, the entangled
single-excitation state left behind by the first detection, and a brute-force
two-path amplitude sum that validates the closed forms. For unequal decay
rates two readings exist: the literal closed form keeps a single
non-interference envelope, while the amplitude sum keeps both; both routes
are implemented and the mode is threaded through run outputs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .geometry import EmitterPair


class G2Mode(str, Enum):
    """Which route to use when the decay rates differ.

    ``single_envelope`` is the literal closed form, which keeps one
    non-interference envelope; ``dual_envelope`` is the coherent two-path
    amplitude sum, which keeps both. The two coincide for equal rates.
    """

    SINGLE_ENVELOPE = "single_envelope"
    DUAL_ENVELOPE = "dual_envelope"


@dataclass(frozen=True)
class TimingRecord:
    """Detection times plus per-detector transit times.

    Emission times are detection minus transit; a detection earlier than any
    possible emission is unphysical and rejected at construction.
    """

    t1: float
    t2: float
    transit1: float = 0.0
    transit2: float = 0.0

    def __post_init__(self):
        if self.emission1 < 0.0 or self.emission2 < 0.0:
            raise ValueError(
                "negative emission time: detection happens before any photon "
                "could have been emitted"
            )

    @property
    def emission1(self) -> float:
        return self.t1 - self.transit1

    @property
    def emission2(self) -> float:
        return self.t2 - self.transit2


@dataclass(frozen=True)
class FieldNormalization:
    """Per-photon field amplitude; normalized observables do not depend on it."""

    e_field: float = 1.0

    def __post_init__(self):
        if self.e_field <= 0.0:
            raise ValueError("field amplitude must be positive")

    @property
    def g2_norm(self) -> float:
        """Divisor mapping the raw coincidence density to its normalized form."""
        return 4.0 * self.e_field**4


def coincidence_density(
    pair: EmitterPair,
    phi1: float,
    phi2: float,
    timing: TimingRecord,
    fields: FieldNormalization = FieldNormalization(),
) -> float:
    """Raw (unnormalized) coincidence density, literal closed form.

    2*E^4 * (exp(-2*(ga*te1 + gb*te2)) + exp(-(ga+gb)*(te1+te2))*cos(phi2-phi1))
    with te the emission times. For unequal rates this keeps only one
    non-interference envelope; see :func:`g2_amplitude_oracle` for the
    two-envelope amplitude sum.
    """
    te1, te2 = timing.emission1, timing.emission2
    ga, gb = pair.gamma_a, pair.gamma_b
    envelope = math.exp(-2.0 * (ga * te1 + gb * te2))
    cross = math.exp(-(ga + gb) * (te1 + te2))
    return 2.0 * fields.e_field**4 * (envelope + cross * math.cos(phi2 - phi1))


def g2_analytic(
    pair: EmitterPair,
    phi1: float,
    phi2: float,
    timing: TimingRecord,
    fields: FieldNormalization = FieldNormalization(),
) -> float:
    """Normalized coincidence density at detector phases (phi1, phi2).

    Equal decay rates reduce to (1/2)*exp(-2*gamma*(te1+te2))*(1+cos(phi2-phi1)).
    """
    return coincidence_density(pair, phi1, phi2, timing, fields) / fields.g2_norm


def g2_amplitude_oracle(
    pair: EmitterPair,
    phi1: float,
    phi2: float,
    timing: TimingRecord,
) -> float:
    """Brute-force |two-path amplitude|^2, keeping both exponential envelopes.

    The two indistinguishable assignments (emitter a's photon to detector 1
    and b's to 2, or the reverse) are summed coherently with per-path phases
    +-(phi_i/2) from the symmetric exponent decomposition. Normalized so the
    equal-rate case matches :func:`g2_analytic` exactly.
    """
    te1, te2 = timing.emission1, timing.emission2
    ga, gb = pair.gamma_a, pair.gamma_b
    dphi = phi2 - phi1
    path_ab = math.exp(-ga * te1 - gb * te2) * cmath.exp(-0.5j * dphi)
    path_ba = math.exp(-gb * te1 - ga * te2) * cmath.exp(0.5j * dphi)
    return abs(path_ab + path_ba) ** 2 / 4.0


def visibility(
    pair: EmitterPair,
    t1: float,
    t2: float,
    transit: float = 0.0,
    mode: G2Mode = G2Mode.SINGLE_ENVELOPE,
) -> float:
    """Fringe contrast (max - min)/(max + min) of the coincidence signal.

    Both detectors are assumed to share the transit time, which cancels from
    the contrast. Equal decay rates give exactly 1 for any detection times.
    In single-envelope mode the contrast is exp((ga-gb)*(t1-t2)), the ratio
    of the interference envelope to the single retained non-interference one;
    it exceeds 1 for some unequal-rate timings. Dual-envelope mode keeps both
    envelopes and yields 1/cosh((ga-gb)*(t1-t2)) <= 1.
    """
    if t1 < transit or t2 < transit:
        raise ValueError("detection times must not precede the transit time")
    exponent = (pair.gamma_a - pair.gamma_b) * (t1 - t2)
    if mode is G2Mode.SINGLE_ENVELOPE:
        return math.exp(exponent)
    return 1.0 / math.cosh(exponent)


_NORM_TOL = 1e-12


@dataclass(frozen=True)
class ConditionalState:
    """Single-excitation entangled state of the emitters after one detection.

    Basis {|g e>, |e g>}. The state stores the phase recorded by the first
    detector as the relative phase of its two amplitudes until the second
    photon is emitted.
    """

    amplitude_ge: complex
    amplitude_eg: complex

    def __post_init__(self):
        norm = abs(self.amplitude_ge) ** 2 + abs(self.amplitude_eg) ** 2
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError("conditional state amplitudes must be normalized to 1e-12")

    @property
    def relative_phase(self) -> float:
        """Phase of amplitude_eg relative to amplitude_ge, in (-pi, pi]."""
        return cmath.phase(self.amplitude_eg * self.amplitude_ge.conjugate())


def conditional_state(phi1: float) -> ConditionalState:
    """State left by the first detection at phase phi1.

    Equal-magnitude amplitudes 1/sqrt(2) with relative phase phi1.
    """
    amplitude = 1.0 / math.sqrt(2.0)
    return ConditionalState(
        amplitude_ge=complex(amplitude),
        amplitude_eg=cmath.exp(1j * phi1) * amplitude,
    )


def second_detection_prob(state: ConditionalState, phi2: float) -> float:
    """Normalized second-detection probability at phase phi2 (maximum 1).

    (1 + cos(phi2 - phi_stored))/2, where phi_stored is the relative phase
    held by the conditional state.
    """
    return 0.5 * (1.0 + math.cos(phi2 - state.relative_phase))
