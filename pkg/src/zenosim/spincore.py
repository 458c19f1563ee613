"""Coherent core: states, pulses, stochastic noise, and exact ensemble maps.

The simulated ion has four relevant levels, indexed in the fixed order

    0: |F=0, m=0>   dark ground state (the qubit "off" level)
    1: |F=1, m=-1>  bright Zeeman sublevel, not driven
    2: |F=1, m=0>   bright qubit level, coupled to level 0 by the microwave
    3: |F=1, m=+1>  bright Zeeman sublevel, not driven

Single trajectories evolve pure states with stochastic noise (phase flips,
projections, pumping).  The density-matrix operations implement the exact
ensemble average of the same noise model and serve as the independent oracle
the Monte-Carlo results are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from ._pykernel import (
    dephase_step,
    flip_probability,
    prepare_step,
    pulse_elements,
)

LEVEL_DARK = 0
LEVEL_ZMINUS = 1
LEVEL_MID = 2
LEVEL_ZPLUS = 3

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class PulseSpec:
    """One rectangular microwave pulse on the dark <-> m=0 transition.

    Parameters
    ----------
    rabi_frequency : float
        Resonant Rabi angular frequency Omega in rad/s (non-negative; use
        ``phase`` to flip the rotation sense).
    duration : float
        Pulse length tau in seconds.
    detuning : float
        Angular detuning delta of the drive from the transition, rad/s.
        The same physical detuning also governs free precession between
        pulses.
    phase : float
        Drive phase in radians.
    """

    rabi_frequency: float
    duration: float
    detuning: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.rabi_frequency < 0.0:
            raise ValueError("rabi_frequency must be non-negative")
        if self.duration < 0.0:
            raise ValueError("duration must be non-negative")

    @property
    def area(self) -> float:
        """Pulse area theta = Omega * tau (the polar rotation angle)."""
        return self.rabi_frequency * self.duration


@dataclass(frozen=True)
class NoiseParams:
    """Imperfection model for a trajectory or ensemble.

    dephasing_rate : float
        Rate gamma of qubit phase diffusion, 1/s.  Unraveled per step as a
        phase flip with probability (1 - exp(-gamma*t))/2, so the ensemble
        coherence decays as exp(-gamma*t).
    zeeman_pump_prob : float
        Probability per probe that a bright m=0 ion is pumped into one of
        the m=+-1 sublevels (split evenly), where the microwave no longer
        couples.
    preparation_error : float
        Probability that state preparation leaves the ion outside the dark
        state.
    prep_sink : str
        Where a faulty preparation lands: "m0" (driven bright level) or
        "zeeman" (m=+-1, split evenly).
    """

    dephasing_rate: float = 0.0
    zeeman_pump_prob: float = 0.0
    preparation_error: float = 0.0
    prep_sink: str = "m0"

    def __post_init__(self):
        if self.dephasing_rate < 0.0:
            raise ValueError("dephasing_rate must be non-negative")
        if not 0.0 <= self.zeeman_pump_prob <= 1.0:
            raise ValueError("zeeman_pump_prob must lie in [0, 1]")
        if not 0.0 <= self.preparation_error <= 1.0:
            raise ValueError("preparation_error must lie in [0, 1]")
        if self.prep_sink not in ("m0", "zeeman"):
            raise ValueError("prep_sink must be 'm0' or 'zeeman'")

    @classmethod
    def lab(cls) -> "NoiseParams":
        """Imperfections representative of a real trap run.

        18% preparation error, a dephasing rate calibrated so that nine
        undisturbed fractional pulses retain 10% survival, and a small
        per-probe pumping leak into the outer Zeeman sublevels.
        """
        from .calibration import LAB_DEPHASING_RATE
        return cls(dephasing_rate=LAB_DEPHASING_RATE,
                   zeeman_pump_prob=0.015,
                   preparation_error=0.18)


@dataclass(eq=False)
class SpinState:
    """Pure state of the four-level system (unit norm enforced)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (4,):
            raise ValueError("amplitudes must have shape (4,)")
        norm_sq = float(np.sum(amps.real ** 2 + amps.imag ** 2))
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm^2 = {norm_sq!r} is not 1")
        self.amplitudes = amps

    @classmethod
    def dark(cls) -> "SpinState":
        return cls(np.array([1.0, 0.0, 0.0, 0.0], dtype=np.complex128))

    @classmethod
    def bright(cls) -> "SpinState":
        return cls(np.array([0.0, 0.0, 1.0, 0.0], dtype=np.complex128))

    @classmethod
    def zeeman(cls, m: int) -> "SpinState":
        if m not in (-1, 1):
            raise ValueError("m must be -1 or +1")
        amps = np.zeros(4, dtype=np.complex128)
        amps[LEVEL_ZMINUS if m == -1 else LEVEL_ZPLUS] = 1.0
        return cls(amps)

    @property
    def populations(self) -> np.ndarray:
        a = self.amplitudes
        return a.real ** 2 + a.imag ** 2

    @property
    def ground_population(self) -> float:
        a = self.amplitudes[LEVEL_DARK]
        return a.real * a.real + a.imag * a.imag

    @property
    def bright_population(self) -> float:
        p = self.populations
        return float(p[LEVEL_ZMINUS] + p[LEVEL_MID] + p[LEVEL_ZPLUS])

    @property
    def qubit_coherence(self) -> complex:
        """Off-diagonal element <dark|rho|m=0> of the pure-state projector."""
        a = self.amplitudes
        return complex(a[LEVEL_DARK] * np.conj(a[LEVEL_MID]))


@dataclass(eq=False)
class DensityMatrix:
    """Ensemble state: Hermitian, unit-trace, positive 4x4 matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=np.complex128)
        if rho.shape != (4, 4):
            raise ValueError("matrix must have shape (4, 4)")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-9:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-9:
            raise ValueError("trace must be 1")
        if np.min(np.linalg.eigvalsh(rho)) < -1e-9:
            raise ValueError("matrix has a negative eigenvalue")
        self.matrix = rho

    @classmethod
    def from_state(cls, state: SpinState) -> "DensityMatrix":
        a = state.amplitudes
        return cls(np.outer(a, a.conj()))

    @classmethod
    def dark(cls) -> "DensityMatrix":
        return cls.from_state(SpinState.dark())

    @property
    def populations(self) -> np.ndarray:
        return np.diag(self.matrix).real.copy()

    @property
    def ground_population(self) -> float:
        return float(self.matrix[LEVEL_DARK, LEVEL_DARK].real)


def _unpack(state: SpinState) -> tuple[complex, complex, complex, complex]:
    a = state.amplitudes
    return (complex(a[0]), complex(a[1]), complex(a[2]), complex(a[3]))


def _pack(a0: complex, am: complex, a1: complex, ap: complex) -> SpinState:
    return SpinState(np.array([a0, am, a1, ap], dtype=np.complex128))


def pulse_propagator(pulse: PulseSpec) -> np.ndarray:
    """2x2 unitary on the (dark, m=0) pair for one rectangular pulse.

    The generalized Rabi frequency is sqrt(Omega^2 + delta^2); on resonance
    the dark-state survival after the pulse is cos^2(area/2).
    """
    u00, u01, u10, u11 = pulse_elements(pulse.rabi_frequency, pulse.duration,
                                        pulse.detuning, pulse.phase)
    return np.array([[u00, u01], [u10, u11]], dtype=np.complex128)


def apply_pulse(state: SpinState, pulse: PulseSpec) -> SpinState:
    """Coherently drive the dark <-> m=0 pair; m=+-1 amplitudes are inert."""
    u00, u01, u10, u11 = pulse_elements(pulse.rabi_frequency, pulse.duration,
                                        pulse.detuning, pulse.phase)
    a0, am, a1, ap = _unpack(state)
    b0 = u00 * a0 + u01 * a1
    b1 = u10 * a0 + u11 * a1
    return _pack(b0, am, b1, ap)


def free_evolution(state: SpinState, duration: float,
                   detuning: float) -> SpinState:
    """Free precession: the m=0 amplitude acquires exp(-i*detuning*duration)."""
    a0, am, a1, ap = _unpack(state)
    dt = detuning * duration
    pr = cos(dt)
    pi = -sin(dt)
    a1 = complex(a1.real * pr - a1.imag * pi, a1.real * pi + a1.imag * pr)
    return _pack(a0, am, a1, ap)


def apply_dephasing(state: SpinState, noise: NoiseParams, duration: float,
                    rng: np.random.Generator) -> SpinState:
    """One stochastic phase-flip step over ``duration``.

    Consumes exactly one uniform draw regardless of the rate, so trajectory
    draw schedules do not depend on the noise setting.  Averaged over draws
    the qubit coherence shrinks by exp(-dephasing_rate * duration).
    """
    a0, am, a1, ap = _unpack(state)
    q = flip_probability(noise.dephasing_rate, duration)
    a1 = dephase_step(rng, a1, q)
    return _pack(a0, am, a1, ap)


def prepare_state(noise: NoiseParams,
                  rng: np.random.Generator) -> tuple[SpinState, bool]:
    """Draw one prepared state; returns (state, prepared_ok)."""
    a0, am, a1, ap, ok = prepare_step(rng, noise.preparation_error,
                                      noise.prep_sink == "zeeman")
    return _pack(a0, am, a1, ap), bool(ok)


def evolve_density(rho: DensityMatrix, pulse: PulseSpec,
                   noise: NoiseParams) -> DensityMatrix:
    """Exact ensemble map for one pulse: unitary drive plus dephasing.

    Applies the pulse propagator on the driven pair, then multiplies every
    coherence involving the m=0 level by exp(-gamma*tau).  This is the
    ensemble average of ``apply_pulse`` followed by ``apply_dephasing`` over
    the pulse window.
    """
    u = pulse_propagator(pulse)
    u4 = np.eye(4, dtype=np.complex128)
    u4[np.ix_([LEVEL_DARK, LEVEL_MID], [LEVEL_DARK, LEVEL_MID])] = u
    out = u4 @ rho.matrix @ u4.conj().T
    _damp_mid_coherences(out, noise.dephasing_rate, pulse.duration)
    return DensityMatrix(out)


def idle_density(rho: DensityMatrix, duration: float, detuning: float,
                 noise: NoiseParams) -> DensityMatrix:
    """Exact ensemble map for a free intermission: precession + dephasing."""
    out = rho.matrix.copy()
    ph = complex(cos(detuning * duration), -sin(detuning * duration))
    for i in range(4):
        if i != LEVEL_MID:
            out[LEVEL_MID, i] *= ph
            out[i, LEVEL_MID] *= np.conj(ph)
    _damp_mid_coherences(out, noise.dephasing_rate, duration)
    return DensityMatrix(out)


def probe_density(rho: DensityMatrix, noise: NoiseParams) -> DensityMatrix:
    """Exact ensemble map for one projective probe with optical pumping.

    The probe destroys all dark/bright coherence; within the bright manifold
    a fraction ``zeeman_pump_prob`` of the m=0 population leaks evenly into
    m=+-1 (Kraus operators sqrt(eps/2)|m+->|m0| and the matching
    sqrt(1-eps) attenuation of m=0 and its coherences).
    """
    eps = noise.zeeman_pump_prob
    dark = rho.matrix[LEVEL_DARK, LEVEL_DARK]
    bright = rho.matrix.copy()
    bright[LEVEL_DARK, :] = 0.0
    bright[:, LEVEL_DARK] = 0.0
    moved = eps * bright[LEVEL_MID, LEVEL_MID].real
    att = np.sqrt(1.0 - eps)
    for i in (LEVEL_ZMINUS, LEVEL_ZPLUS):
        bright[LEVEL_MID, i] *= att
        bright[i, LEVEL_MID] *= att
    bright[LEVEL_MID, LEVEL_MID] *= (1.0 - eps)
    bright[LEVEL_ZMINUS, LEVEL_ZMINUS] += 0.5 * moved
    bright[LEVEL_ZPLUS, LEVEL_ZPLUS] += 0.5 * moved
    out = bright
    out[LEVEL_DARK, LEVEL_DARK] = dark
    return DensityMatrix(out)


def prepare_density(noise: NoiseParams) -> DensityMatrix:
    """Ensemble state right after (possibly faulty) preparation."""
    f = noise.preparation_error
    out = np.zeros((4, 4), dtype=np.complex128)
    out[LEVEL_DARK, LEVEL_DARK] = 1.0 - f
    if noise.prep_sink == "zeeman":
        out[LEVEL_ZMINUS, LEVEL_ZMINUS] = 0.5 * f
        out[LEVEL_ZPLUS, LEVEL_ZPLUS] = 0.5 * f
    else:
        out[LEVEL_MID, LEVEL_MID] = f
    return DensityMatrix(out)


def _damp_mid_coherences(rho: np.ndarray, gamma: float,
                         duration: float) -> None:
    factor = np.exp(-gamma * duration)
    for i in range(4):
        if i != LEVEL_MID:
            rho[LEVEL_MID, i] *= factor
            rho[i, LEVEL_MID] *= factor
