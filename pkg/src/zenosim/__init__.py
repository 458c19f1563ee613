"""Trajectory simulator and statistics for a repeatedly probed driven ion.

A microwave drives the two hyperfine qubit levels of a single trapped ion
while short optical probe pulses repeatedly project the state onto its
fluorescing ("on") or dark ("off") manifold.  The package simulates such
measurement records trajectory by trajectory, including detection and
preparation imperfections, and provides the run-length and survival
statistics that compare them with the closed-form predictions for frequent
projective observation.
"""

from .calibration import (
    FitError,
    LAB_DEPHASING_RATE,
    OscillationFit,
    calibrate_dephasing_rate,
    fit_oscillation,
    undisturbed_survival,
)
from .detector import DetectorModel, ProbeOutcome, classify, false_rates, probe, project, sample_counts
from .kernel import BACKEND, USING_COMPILED
from .protocols import (
    ExperimentConfig,
    ScanResult,
    SeriesRecord,
    Trajectory,
    run_fractionated_pi,
    run_rabi_scan,
    run_ramsey_scan,
    run_series,
    run_zeno_trajectory,
)
from .spincore import (
    DensityMatrix,
    NoiseParams,
    PulseSpec,
    SpinState,
    apply_dephasing,
    apply_pulse,
    evolve_density,
    free_evolution,
    idle_density,
    prepare_density,
    prepare_state,
    probe_density,
    pulse_propagator,
)
from .stats import (
    FitUnderdeterminedError,
    InvalidCorrectionError,
    RunLengthHistogram,
    SurvivalEstimate,
    ThetaFit,
    apply_correction,
    combine_runs,
    correct_estimate,
    estimate_intermediate,
    estimate_nonselective,
    estimate_selective,
    extract_runs,
    fit_theta,
    intermediate_survival,
    nonselective_survival,
    ratio_table,
    run_survival,
    selective_survival,
    sequence_ratio,
    survival_probability,
)

__version__ = "0.1.0"
