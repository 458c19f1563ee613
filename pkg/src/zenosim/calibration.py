"""Calibration utilities: scan fits and noise-parameter matching.

``fit_oscillation`` recovers the drive parameters behind a rabi or ramsey
scan (the fitted angular frequency is the Rabi frequency or the detuning
respectively).  ``calibrate_dephasing_rate`` inverts the exact ensemble maps
to find the phase-noise rate that reproduces a measured survival after a
train of undisturbed fractional pulses.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np
from scipy.optimize import brentq, curve_fit

from .spincore import DensityMatrix, NoiseParams, PulseSpec, evolve_density, idle_density, prepare_density

# Dephasing rate (1/s) at which nine undisturbed pulses of area pi/9
# (2.9 ms drive, 3 ms intermissions) retain a survival of 0.10.  Frozen from
# calibrate_dephasing_rate(); a regression test ties the two together.
LAB_DEPHASING_RATE = 8.384140104524757


class FitError(RuntimeError):
    """Raised when a scan fit cannot converge on a fringe."""


@dataclass(frozen=True)
class OscillationFit:
    """Result of fitting excitation = offset + amplitude*cos(w*x + phase)."""

    frequency: float
    frequency_sigma: float
    amplitude: float
    offset: float
    phase: float
    no_fringe: bool


def fit_oscillation(axis: np.ndarray, excitation: np.ndarray) -> OscillationFit:
    """Fit a cosine fringe to per-step excitation averages.

    The initial guess comes from the periodogram peak; when that peak does
    not stand out of the spectral floor the data carry no detectable fringe
    and a flagged result is returned instead of a meaningless fit.
    """
    x = np.asarray(axis, dtype=float)
    y = np.asarray(excitation, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 8:
        raise ValueError("need matching 1-d arrays with at least 8 steps")
    step = x[1] - x[0]
    if step <= 0 or np.max(np.abs(np.diff(x) - step)) > 1e-9 * step:
        raise ValueError("axis must be uniformly spaced")

    centered = y - y.mean()
    spectrum = np.fft.rfft(centered)
    power = np.abs(spectrum) ** 2
    if power.size < 3:
        raise ValueError("scan too short for a spectral fringe search")
    peak = 1 + int(np.argmax(power[1:]))
    floor = float(np.median(power[1:]))
    strong = floor > 0.0 and float(power[peak]) / floor >= 10.0
    if not strong:
        return OscillationFit(frequency=float("nan"),
                              frequency_sigma=float("nan"), amplitude=0.0,
                              offset=float(y.mean()), phase=0.0,
                              no_fringe=True)

    w0 = 2.0 * pi * peak / (x.size * step)
    amp0 = 2.0 * np.abs(spectrum[peak]) / x.size
    phase0 = float(np.angle(spectrum[peak]))

    def model(t, offset, amplitude, w, phase):
        return offset + amplitude * np.cos(w * t + phase)

    try:
        popt, pcov = curve_fit(model, x, y,
                               p0=[float(y.mean()), amp0, w0, phase0],
                               maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"oscillation fit did not converge: {exc}") from exc
    offset, amplitude, w, phase = popt
    w_sigma = float(np.sqrt(pcov[2, 2]))
    if amplitude < 0:
        amplitude = -amplitude
        phase += pi
    return OscillationFit(frequency=float(abs(w)), frequency_sigma=w_sigma,
                          amplitude=float(amplitude), offset=float(offset),
                          phase=float(phase % (2.0 * pi)), no_fringe=False)


def undisturbed_survival(gamma: float, n: int = 9,
                         pulse_duration: float = 0.0029,
                         intermission: float = 0.003,
                         detuning: float = 0.0) -> float:
    """Ground-state survival after n unprobed pulses of area pi/n.

    Exact ensemble computation: dephasing at rate ``gamma`` acts through the
    pulses and the free intermissions; nothing interrupts the coherent
    evolution, so with gamma = 0 the n fractions compose to a full flip and
    the survival vanishes.
    """
    noise = NoiseParams(dephasing_rate=gamma)
    pulse = PulseSpec(rabi_frequency=(pi / n) / pulse_duration,
                      duration=pulse_duration, detuning=detuning)
    rho = prepare_density(NoiseParams())
    for i in range(n):
        rho = evolve_density(rho, pulse, noise)
        if i != n - 1:
            rho = idle_density(rho, intermission, detuning, noise)
    return rho.ground_population


def calibrate_dephasing_rate(target_survival: float = 0.10, n: int = 9,
                             pulse_duration: float = 0.0029,
                             intermission: float = 0.003) -> float:
    """Rate gamma at which ``undisturbed_survival`` equals the target.

    The survival grows monotonically from ~0 (coherent flip) towards the
    fully dephased limit, so a sign-bracketed root always exists for targets
    between the two.
    """
    if not 0.0 < target_survival < 0.5:
        raise ValueError("target_survival must lie in (0, 0.5)")

    def gap(gamma: float) -> float:
        return undisturbed_survival(gamma, n, pulse_duration,
                                    intermission) - target_survival

    return float(brentq(gap, 0.0, 1.0e4, xtol=1e-10, rtol=1e-14))
