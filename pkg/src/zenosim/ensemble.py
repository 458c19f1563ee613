"""Batch Monte-Carlo evolution of many states under an operation sequence.

This is the cross-check machinery for the exact ensemble maps: the same
operation list can be run as N stochastic trajectories (here, vectorized
over a batch) or pushed through the density-matrix maps, and the resulting
level populations must agree to binomial accuracy.  It is deliberately
independent of the trajectory kernels: plain NumPy batch operations, its own
draw layout.

An operation sequence is a list of tuples:

    ("prepare",)                  draw a fresh (possibly faulty) preparation
    ("pulse", PulseSpec)          coherent drive + dephasing over the pulse
    ("idle", duration, detuning)  free precession + dephasing
    ("probe",)                    projective measurement + Zeeman pumping
"""

from __future__ import annotations

import numpy as np

from . import spincore
from .spincore import DensityMatrix, NoiseParams, PulseSpec

Operation = tuple


def run_ensemble(ops: list[Operation], noise: NoiseParams, n: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Evolve ``n`` trajectories through ``ops``; returns mean populations."""
    psi = np.zeros((n, 4), dtype=np.complex128)
    psi[:, 0] = 1.0
    for op in ops:
        kind = op[0]
        if kind == "prepare":
            _prepare(psi, noise, rng)
        elif kind == "pulse":
            pulse = op[1]
            u2 = spincore.pulse_propagator(pulse)
            psi[:, [0, 2]] = psi[:, [0, 2]] @ u2.T
            _dephase(psi, noise, pulse.duration, rng)
        elif kind == "idle":
            _, duration, detuning = op
            psi[:, 2] *= np.exp(-1j * detuning * duration)
            _dephase(psi, noise, duration, rng)
        elif kind == "probe":
            _probe(psi, noise, rng)
        else:
            raise ValueError(f"unknown operation {kind!r}")
    return np.mean(np.abs(psi) ** 2, axis=0)


def run_oracle(ops: list[Operation], noise: NoiseParams) -> np.ndarray:
    """Push the same sequence through the exact ensemble maps."""
    rho = DensityMatrix.dark()
    for op in ops:
        kind = op[0]
        if kind == "prepare":
            rho = spincore.prepare_density(noise)
        elif kind == "pulse":
            rho = spincore.evolve_density(rho, op[1], noise)
        elif kind == "idle":
            rho = spincore.idle_density(rho, op[1], op[2], noise)
        elif kind == "probe":
            rho = spincore.probe_density(rho, noise)
        else:
            raise ValueError(f"unknown operation {kind!r}")
    return rho.populations


def _prepare(psi: np.ndarray, noise: NoiseParams,
             rng: np.random.Generator) -> None:
    n = psi.shape[0]
    u = rng.random(n)
    faulty = u < noise.preparation_error
    psi[:] = 0.0
    psi[~faulty, 0] = 1.0
    if noise.prep_sink == "zeeman":
        lower = faulty & (u < 0.5 * noise.preparation_error)
        psi[lower, 1] = 1.0
        psi[faulty & ~lower, 3] = 1.0
    else:
        psi[faulty, 2] = 1.0


def _dephase(psi: np.ndarray, noise: NoiseParams, duration: float,
             rng: np.random.Generator) -> None:
    q = 0.5 * (1.0 - np.exp(-noise.dephasing_rate * duration))
    flips = rng.random(psi.shape[0]) < q
    psi[flips, 2] *= -1.0


def _probe(psi: np.ndarray, noise: NoiseParams,
           rng: np.random.Generator) -> None:
    n = psi.shape[0]
    weights = np.abs(psi) ** 2
    p_bright = weights[:, 1] + weights[:, 2] + weights[:, 3]
    bright = rng.random(n) < p_bright
    dark = ~bright
    psi[dark] = 0.0
    psi[dark, 0] = 1.0
    # renormalize the bright rows onto the F=1 manifold
    norm = np.sqrt(p_bright[bright])
    psi[bright] /= norm[:, None]
    psi[bright, 0] = 0.0
    # optical pumping of surviving m=0 weight into the decoupled sublevels
    eps = noise.zeeman_pump_prob
    w0 = np.abs(psi[:, 2]) ** 2
    u = rng.random(n)
    pump = bright & (w0 > 0.0) & (u < eps)
    for target in (1, 3):
        sel = pump & ((u < 0.5 * eps) if target == 1 else (u >= 0.5 * eps))
        mag = np.sqrt(np.abs(psi[sel, target]) ** 2 + w0[sel])
        psi[sel, target] = mag
        psi[sel, 2] = 0.0
