"""Experiment protocols: measurement schedules built from the kernel.

Four schedules are provided:

* ``zeno``          -- one long trajectory alternating drive pulse and probe.
* ``fractionated``  -- many short series: one preparation, n pulses of area
                       pi/n, and either probes (variant "c") or free
                       intermissions (variant "b"; variant "a" is the single
                       full pulse, n = 1) between them.
* ``rabi``          -- prepare/drive/probe with stepwise growing pulse length.
* ``ramsey``        -- two fixed pulses separated by a stepwise growing gap.

Reproducibility: every independent unit (the zeno trajectory, each
fractionated series, each scan trajectory) draws from its own PCG64 stream
derived from (master_seed, unit_index), so results are independent of
execution order and any unit can be replayed in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import numpy as np

from . import kernel
from .detector import DetectorModel
from .spincore import NoiseParams, PulseSpec

PROTOCOLS = ("zeno", "fractionated", "rabi", "ramsey")
VARIANTS = ("a", "b", "c")


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete, immutable description of one simulation run."""

    protocol: str
    pulse: PulseSpec
    detector: DetectorModel = field(default_factory=DetectorModel)
    noise: NoiseParams = field(default_factory=NoiseParams)
    probe_duration: float = 0.002
    master_seed: int = 0
    # zeno
    n_measurements: int = 0
    reprepare_on_bright: bool = False
    # fractionated
    fraction_n: int = 1
    variant: str = "c"
    n_series: int = 0
    intermission: float | None = None
    # scans
    tau_step: float = 0.0
    gap_step: float = 0.0
    n_steps: int = 0
    n_trajectories: int = 0

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.probe_duration < 0.0:
            raise ValueError("probe_duration must be non-negative")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must fit in an unsigned 64-bit int")
        if self.intermission is not None and self.intermission < 0.0:
            raise ValueError("intermission must be non-negative")
        if self.protocol == "zeno":
            if self.n_measurements < 1:
                raise ValueError("zeno runs need n_measurements >= 1")
        elif self.protocol == "fractionated":
            if self.fraction_n < 1:
                raise ValueError("fraction_n must be >= 1")
            if self.n_series < 1:
                raise ValueError("fractionated runs need n_series >= 1")
            if self.variant not in VARIANTS:
                raise ValueError(f"unknown variant {self.variant!r}")
            if self.variant == "a" and self.fraction_n != 1:
                raise ValueError("variant 'a' is the single full pulse "
                                 "(fraction_n must be 1)")
        else:
            if self.n_steps < 1 or self.n_trajectories < 1:
                raise ValueError(f"{self.protocol} scans need n_steps and "
                                 "n_trajectories >= 1")
            if self.protocol == "rabi" and self.tau_step <= 0.0:
                raise ValueError("rabi scans need tau_step > 0")
            if self.protocol == "ramsey" and self.gap_step <= 0.0:
                raise ValueError("ramsey scans need gap_step > 0")

    @property
    def effective_intermission(self) -> float:
        """Intermission length; defaults to the probe window when unset."""
        if self.intermission is None:
            return self.probe_duration
        return self.intermission


@dataclass(eq=False)
class Trajectory:
    """Ordered record of one zeno run, replayable from its config."""

    config: ExperimentConfig
    photon_counts: np.ndarray
    classified_bits: np.ndarray
    true_manifolds: np.ndarray

    def __len__(self) -> int:
        return len(self.classified_bits)


@dataclass(frozen=True)
class SeriesRecord:
    """Outcome of one fractionated series."""

    prepared_ok: bool
    intermediate_bits: tuple[int, ...]
    final_bit: int


@dataclass(eq=False)
class ScanResult:
    """Bit matrix of a rabi or ramsey scan: shape (n_trajectories, n_steps)."""

    config: ExperimentConfig
    axis: np.ndarray
    bits: np.ndarray

    @property
    def excitation(self) -> np.ndarray:
        """Per-step fraction of "on" results across trajectories."""
        return self.bits.mean(axis=0)


def stream(master_seed: int, index: int) -> np.random.PCG64:
    """Independent bit-generator stream for unit ``index`` of a run."""
    return np.random.PCG64(np.random.SeedSequence(master_seed,
                                                  spawn_key=(index,)))


def _detector_args(model: DetectorModel) -> tuple[float, float, int]:
    return (model.mean_counts_bright, model.mean_counts_dark,
            int(model.threshold))


def _noise_args(noise: NoiseParams) -> tuple[float, float, float, bool]:
    return (noise.dephasing_rate, noise.zeeman_pump_prob,
            noise.preparation_error, noise.prep_sink == "zeeman")


def run_zeno_trajectory(config: ExperimentConfig) -> Trajectory:
    """Simulate the alternating drive/probe trajectory of ``config``."""
    if config.protocol != "zeno":
        raise ValueError("config.protocol must be 'zeno'")
    p = config.pulse
    counts, bits, manifolds = kernel.zeno_trajectory(
        stream(config.master_seed, 0), config.n_measurements,
        p.rabi_frequency, p.duration, p.detuning, p.phase,
        config.probe_duration, *_detector_args(config.detector),
        *_noise_args(config.noise), config.reprepare_on_bright)
    return Trajectory(config=config, photon_counts=counts,
                      classified_bits=bits, true_manifolds=manifolds)


def _check_fraction_pulse(config: ExperimentConfig) -> None:
    target = pi / config.fraction_n
    if abs(config.pulse.area - target) > 1e-9 * max(1.0, target):
        raise ValueError("fractionated pulses must have area pi/n "
                         f"(got {config.pulse.area!r}, need {target!r})")


def run_series(config: ExperimentConfig, index: int) -> SeriesRecord:
    """Run the ``index``-th fractionated series of ``config`` on its own
    stream.  ``run_fractionated_pi`` is a loop over this, so any single
    series can be reproduced without rerunning the batch."""
    if config.protocol != "fractionated":
        raise ValueError("config.protocol must be 'fractionated'")
    _check_fraction_pulse(config)
    p = config.pulse
    ok, bits = kernel.fractionated_series(
        stream(config.master_seed, index), config.fraction_n,
        p.rabi_frequency, p.duration, p.detuning, p.phase,
        config.variant == "c", config.effective_intermission,
        config.probe_duration, *_detector_args(config.detector),
        *_noise_args(config.noise))
    bit_list = [int(b) for b in bits]
    return SeriesRecord(prepared_ok=bool(ok),
                        intermediate_bits=tuple(bit_list[:-1]),
                        final_bit=bit_list[-1])


def run_fractionated_pi(config: ExperimentConfig) -> list[SeriesRecord]:
    """Simulate all series of a fractionated run (pulse area pi/n each)."""
    if config.protocol != "fractionated":
        # n_series is 0 for other protocols; the loop must not mask that
        raise ValueError("config.protocol must be 'fractionated'")
    return [run_series(config, i) for i in range(config.n_series)]


def run_rabi_scan(config: ExperimentConfig) -> ScanResult:
    """Excitation versus pulse length: steps k*tau_step, k = 1..n_steps."""
    if config.protocol != "rabi":
        raise ValueError("config.protocol must be 'rabi'")
    p = config.pulse
    rows = []
    for t in range(config.n_trajectories):
        rows.append(kernel.rabi_scan_trajectory(
            stream(config.master_seed, t), config.n_steps, config.tau_step,
            p.rabi_frequency, p.detuning, p.phase, config.probe_duration,
            *_detector_args(config.detector), *_noise_args(config.noise)))
    axis = config.tau_step * np.arange(1, config.n_steps + 1)
    return ScanResult(config=config, axis=axis, bits=np.vstack(rows))


def run_ramsey_scan(config: ExperimentConfig) -> ScanResult:
    """Excitation versus free-evolution gap: gaps k*gap_step, k = 1..n_steps."""
    if config.protocol != "ramsey":
        raise ValueError("config.protocol must be 'ramsey'")
    p = config.pulse
    rows = []
    for t in range(config.n_trajectories):
        rows.append(kernel.ramsey_scan_trajectory(
            stream(config.master_seed, t), config.n_steps, config.gap_step,
            p.rabi_frequency, p.duration, p.detuning, p.phase,
            config.probe_duration, *_detector_args(config.detector),
            *_noise_args(config.noise)))
    axis = config.gap_step * np.arange(1, config.n_steps + 1)
    return ScanResult(config=config, axis=axis, bits=np.vstack(rows))
