"""Fluorescence detection: projection, photon statistics, classification.

A probe pulse projects the ion onto dark (no resonant scattering) or bright
(strong scattering).  The detector registers a Poisson-distributed photon
count whose mean depends on the manifold, and a threshold turns the count
into the recorded bit.  Overlap of the two count distributions produces the
false-on / false-off classification errors that the statistics layer later
corrects for.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp

import numpy as np

from ._pykernel import count_step, poisson_from_uniform, project_step, zeeman_step
from .spincore import NoiseParams, SpinState, _pack, _unpack


@dataclass(frozen=True)
class DetectorModel:
    """Photon-count model of the probe readout.

    mean_counts_bright / mean_counts_dark are the Poisson means per probe
    window for the two manifolds; ``threshold`` is the smallest count
    classified as "on".  The defaults give roughly a 2% false-on and a 0.3%
    false-off probability.
    """

    mean_counts_bright: float = 8.0
    mean_counts_dark: float = 0.215
    threshold: int = 2

    def __post_init__(self):
        if self.mean_counts_dark < 0.0:
            raise ValueError("mean_counts_dark must be non-negative")
        if self.mean_counts_bright <= self.mean_counts_dark:
            raise ValueError("mean_counts_bright must exceed mean_counts_dark")
        if int(self.threshold) != self.threshold or self.threshold < 1:
            raise ValueError("threshold must be a positive integer")

    @classmethod
    def ideal(cls) -> "DetectorModel":
        """A detector whose classification errors are negligible (< 1e-15)."""
        return cls(mean_counts_bright=50.0, mean_counts_dark=0.0, threshold=2)


@dataclass(frozen=True)
class ProbeOutcome:
    """Everything one probe produces, including ground truth for diagnostics."""

    true_manifold: int
    photon_count: int
    classified_bit: int
    post_state: SpinState


def project(state: SpinState,
            rng: np.random.Generator) -> tuple[int, SpinState]:
    """Projective bright/dark measurement; returns (manifold, collapsed state).

    Dark collapses exactly onto the ground level; bright renormalizes the
    three F=1 amplitudes and zeroes the dark one.
    """
    a0, am, a1, ap = _unpack(state)
    a0, am, a1, ap, manifold = project_step(rng, a0, am, a1, ap)
    return manifold, _pack(a0, am, a1, ap)


def sample_counts(manifold: int, model: DetectorModel,
                  rng: np.random.Generator) -> int:
    """Draw one photon count for the given true manifold."""
    lam = model.mean_counts_bright if manifold else model.mean_counts_dark
    return count_step(rng, lam)


def classify(count: int, model: DetectorModel) -> int:
    """Threshold the photon count: 1 ("on") when count >= threshold."""
    return 1 if count >= model.threshold else 0


def probe(state: SpinState, model: DetectorModel, noise: NoiseParams,
          rng: np.random.Generator) -> ProbeOutcome:
    """One full probe: projection, possible Zeeman pumping, count, threshold.

    Pumping only acts on bright states that retain m=0 weight, moving it into
    a decoupled m=+-1 sublevel with probability ``noise.zeeman_pump_prob``.
    Probing the returned post_state again reproduces the same manifold with
    certainty.
    """
    manifold, state = project(state, rng)
    if manifold:
        a0, am, a1, ap = _unpack(state)
        am, a1, ap = zeeman_step(rng, am, a1, ap, noise.zeeman_pump_prob)
        state = _pack(a0, am, a1, ap)
    count = sample_counts(manifold, model, rng)
    return ProbeOutcome(true_manifold=manifold, photon_count=count,
                        classified_bit=classify(count, model),
                        post_state=state)


def false_rates(model: DetectorModel) -> tuple[float, float]:
    """Exact (false_on, false_off) probabilities of the threshold classifier.

    false_on  = P(Poisson(mean_counts_dark)  >= threshold)
    false_off = P(Poisson(mean_counts_bright) < threshold)
    """
    false_on = 1.0 - _poisson_cdf(model.threshold - 1, model.mean_counts_dark)
    false_off = _poisson_cdf(model.threshold - 1, model.mean_counts_bright)
    return false_on, false_off


def _poisson_cdf(k: int, lam: float) -> float:
    term = exp(-lam)
    total = term
    for j in range(1, k + 1):
        term *= lam / j
        total += term
    return min(total, 1.0)


__all__ = [
    "DetectorModel",
    "ProbeOutcome",
    "classify",
    "false_rates",
    "poisson_from_uniform",
    "probe",
    "project",
    "sample_counts",
]
