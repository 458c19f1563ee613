"""Cross-checks between the two trajectory engines and the op layer.

The compiled and pure kernels must produce bit-identical arrays from the same
bit-generator seed, and composing the public single-step operations by hand
must reproduce a kernel trajectory draw for draw.
"""

import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.random import PCG64

import zenosim._pykernel as pk
from zenosim import kernel
from zenosim.detector import DetectorModel, probe
from zenosim.spincore import (
    NoiseParams,
    PulseSpec,
    apply_dephasing,
    apply_pulse,
    free_evolution,
    prepare_state,
)

try:
    from zenosim import _ckernel as ck
except ImportError:  # pragma: no cover - depends on the build environment
    ck = None

needs_compiled = pytest.mark.skipif(ck is None,
                                    reason="compiled kernel not built")
ENGINES = [pytest.param(pk, id="pure"),
           pytest.param(ck, id="compiled", marks=needs_compiled)]

IDEAL = dict(lam_on=50.0, lam_off=0.0, k_th=2,
             gamma_phi=0.0, eps_z=0.0, f_prep=0.0, sink_zeeman=False)
NOISY = dict(lam_on=8.0, lam_off=0.215, k_th=2,
             gamma_phi=8.4, eps_z=0.015, f_prep=0.18, sink_zeeman=False)
ZSINK = dict(lam_on=8.0, lam_off=0.215, k_th=2,
             gamma_phi=3.0, eps_z=0.3, f_prep=0.5, sink_zeeman=True)

ZENO_CASES = [
    dict(seed=101, n_measurements=3000, omega=(np.pi / 2) / 0.0049,
         tau=0.0049, delta=0.0, phase=0.0, probe_duration=0.002,
         reprepare=False, **IDEAL),
    dict(seed=102, n_measurements=3000, omega=(np.pi / 2) / 0.0049,
         tau=0.0049, delta=0.0, phase=0.0, probe_duration=0.002,
         reprepare=False, **NOISY),
    dict(seed=103, n_measurements=2000, omega=700.0, tau=0.0049,
         delta=130.0, phase=0.7, probe_duration=0.002,
         reprepare=True, **ZSINK),
]

FRAC_CASES = [
    dict(seed=201, n_pulses=9, omega=(np.pi / 9) / 0.0029, tau=0.0029,
         delta=0.0, phase=0.0, probe_intermediate=True, intermission=0.003,
         probe_duration=0.003, **IDEAL),
    dict(seed=202, n_pulses=9, omega=(np.pi / 9) / 0.0029, tau=0.0029,
         delta=40.0, phase=0.2, probe_intermediate=False, intermission=0.003,
         probe_duration=0.003, **NOISY),
    dict(seed=203, n_pulses=5, omega=(np.pi / 5) / 0.0029, tau=0.0029,
         delta=0.0, phase=0.0, probe_intermediate=True, intermission=0.005,
         probe_duration=0.003, **ZSINK),
]


def split(params):
    args = dict(params)
    return args.pop("seed"), args


@needs_compiled
@pytest.mark.parametrize("params", ZENO_CASES)
def test_twin_zeno_bit_identity(params):
    seed, args = split(params)
    ref = pk.zeno_trajectory(PCG64(seed), **args)
    out = ck.zeno_trajectory(PCG64(seed), **args)
    for a, b in zip(ref, out):
        assert np.array_equal(a, b)


@needs_compiled
@pytest.mark.parametrize("params", FRAC_CASES)
def test_twin_fractionated_bit_identity(params):
    seed, args = split(params)
    for s in range(200):
        ok_a, bits_a = pk.fractionated_series(PCG64(seed + s), **args)
        ok_b, bits_b = ck.fractionated_series(PCG64(seed + s), **args)
        assert ok_a == ok_b
        assert np.array_equal(bits_a, bits_b)


@needs_compiled
def test_twin_scan_bit_identity():
    rabi = dict(n_steps=400, tau_step=1e-4, omega=600.0, delta=25.0,
                phase=0.1, probe_duration=0.002, **NOISY)
    assert np.array_equal(pk.rabi_scan_trajectory(PCG64(301), **rabi),
                          ck.rabi_scan_trajectory(PCG64(301), **rabi))
    ramsey = dict(n_steps=400, gap_step=1e-4, omega=(np.pi / 2) / 0.002,
                  tau=0.002, delta=180.0, phase=0.0, probe_duration=0.002,
                  **NOISY)
    assert np.array_equal(pk.ramsey_scan_trajectory(PCG64(302), **ramsey),
                          ck.ramsey_scan_trajectory(PCG64(302), **ramsey))


def test_backend_selection_reports():
    assert kernel.BACKEND in ("compiled", "pure-python")
    assert kernel.USING_COMPILED == (kernel.BACKEND == "compiled")
    # the environment switch must force the fallback in a fresh interpreter
    env = dict(os.environ, ZENOSIM_PURE_PY="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from zenosim import kernel; print(kernel.BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "pure-python"


def zeno_by_ops(seed, n, pulse, noise, det, probe_duration, reprepare):
    """Hand-composed drive/probe loop; must equal the kernel draw for draw."""
    rng = np.random.Generator(PCG64(seed))
    counts = np.empty(n, dtype=np.int64)
    bits = np.empty(n, dtype=np.int8)
    manifolds = np.empty(n, dtype=np.int8)
    state, _ok = prepare_state(noise, rng)
    last = 0
    for i in range(n):
        if reprepare and i > 0 and last == 1:
            state, _ok = prepare_state(noise, rng)
        state = apply_pulse(state, pulse)
        state = apply_dephasing(state, noise, pulse.duration, rng)
        out = probe(state, det, noise, rng)
        state = apply_dephasing(out.post_state, noise, probe_duration, rng)
        counts[i] = out.photon_count
        bits[i] = out.classified_bit
        manifolds[i] = out.true_manifold
        last = out.classified_bit
    return counts, bits, manifolds


@pytest.mark.parametrize("params", ZENO_CASES)
@pytest.mark.parametrize("engine", ENGINES)
def test_kernel_matches_op_composition_zeno(params, engine):
    seed, args = split(params)
    ref = engine.zeno_trajectory(PCG64(seed), **args)
    pulse = PulseSpec(rabi_frequency=args["omega"], duration=args["tau"],
                      detuning=args["delta"], phase=args["phase"])
    noise = NoiseParams(
        dephasing_rate=args["gamma_phi"], zeeman_pump_prob=args["eps_z"],
        preparation_error=args["f_prep"],
        prep_sink="zeeman" if args["sink_zeeman"] else "m0")
    det = DetectorModel(mean_counts_bright=args["lam_on"],
                        mean_counts_dark=args["lam_off"],
                        threshold=args["k_th"])
    ops = zeno_by_ops(seed, args["n_measurements"], pulse, noise, det,
                      args["probe_duration"], args["reprepare"])
    for a, b in zip(ref, ops):
        assert np.array_equal(a, b)


def series_by_ops(seed, n, pulse, noise, det, probe_intermediate,
                  intermission, probe_duration):
    rng = np.random.Generator(PCG64(seed))
    bits = []
    state, ok = prepare_state(noise, rng)
    for i in range(n):
        state = apply_pulse(state, pulse)
        state = apply_dephasing(state, noise, pulse.duration, rng)
        if i == n - 1:
            out = probe(state, det, noise, rng)
            state = apply_dephasing(out.post_state, noise, probe_duration,
                                    rng)
            bits.append(out.classified_bit)
        elif probe_intermediate:
            out = probe(state, det, noise, rng)
            state = apply_dephasing(out.post_state, noise, intermission, rng)
            bits.append(out.classified_bit)
        else:
            state = free_evolution(state, intermission, pulse.detuning)
            state = apply_dephasing(state, noise, intermission, rng)
    return ok, np.array(bits, dtype=np.int8)


@pytest.mark.parametrize("params", FRAC_CASES)
@pytest.mark.parametrize("engine", ENGINES)
def test_kernel_matches_op_composition_fractionated(params, engine):
    seed, args = split(params)
    pulse = PulseSpec(rabi_frequency=args["omega"], duration=args["tau"],
                      detuning=args["delta"], phase=args["phase"])
    noise = NoiseParams(
        dephasing_rate=args["gamma_phi"], zeeman_pump_prob=args["eps_z"],
        preparation_error=args["f_prep"],
        prep_sink="zeeman" if args["sink_zeeman"] else "m0")
    det = DetectorModel(mean_counts_bright=args["lam_on"],
                        mean_counts_dark=args["lam_off"],
                        threshold=args["k_th"])
    for s in range(50):
        ok_ref, bits_ref = engine.fractionated_series(PCG64(seed + s), **args)
        ok_ops, bits_ops = series_by_ops(
            seed + s, args["n_pulses"], pulse, noise, det,
            args["probe_intermediate"], args["intermission"],
            args["probe_duration"])
        assert bool(ok_ref) == bool(ok_ops)
        assert np.array_equal(bits_ref, bits_ops)
