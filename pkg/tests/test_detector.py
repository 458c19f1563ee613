"""Detector tests: projection statistics, count model, threshold errors."""

import numpy as np
import pytest
from scipy import stats as sps

from zenosim.detector import (
    DetectorModel,
    classify,
    false_rates,
    poisson_from_uniform,
    probe,
    project,
    sample_counts,
)
from zenosim.kernel import zeno_trajectory
from zenosim.spincore import NoiseParams, PulseSpec, SpinState, apply_pulse


def test_detector_model_validation():
    with pytest.raises(ValueError):
        DetectorModel(mean_counts_bright=0.2, mean_counts_dark=8.0)
    with pytest.raises(ValueError):
        DetectorModel(mean_counts_dark=-0.1)
    with pytest.raises(ValueError):
        DetectorModel(threshold=0)
    with pytest.raises(ValueError):
        DetectorModel(threshold=2.5)


def test_project_pure_states_deterministic():
    rng = np.random.default_rng(0)
    for _ in range(50):
        manifold, post = project(SpinState.dark(), rng)
        assert manifold == 0
        assert post.ground_population == 1.0
    bright = apply_pulse(SpinState.dark(), PulseSpec(np.pi / 0.003, 0.003))
    for _ in range(50):
        manifold, post = project(bright, rng)
        assert manifold == 1
        assert post.ground_population < 1e-12


def test_project_born_frequencies():
    theta = 2.0 * np.pi / 5.0
    state = apply_pulse(SpinState.dark(), PulseSpec(theta / 0.003, 0.003))
    p_bright = 1.0 - np.cos(theta / 2.0) ** 2
    rng = np.random.default_rng(5)
    n = 30000
    hits = sum(project(state, rng)[0] for _ in range(n))
    sigma = np.sqrt(n * p_bright * (1.0 - p_bright))
    assert abs(hits - n * p_bright) < 4.0 * sigma


def test_project_renormalizes_post_state():
    state = apply_pulse(SpinState.dark(), PulseSpec((np.pi / 3) / 0.003, 0.003))
    rng = np.random.default_rng(9)
    for _ in range(200):
        _, post = project(state, rng)
        assert abs(float(np.sum(post.populations)) - 1.0) < 1e-12


def test_sample_counts_zero_rate_and_draw_consumption():
    ideal = DetectorModel.ideal()
    rng = np.random.default_rng(2)
    for _ in range(100):
        assert sample_counts(0, ideal, rng) == 0
    # the zero-rate branch must still burn exactly one uniform
    rng_a = np.random.default_rng(13)
    sample_counts(0, ideal, rng_a)
    rng_b = np.random.default_rng(13)
    rng_b.random()
    assert rng_a.random() == rng_b.random()


@pytest.mark.parametrize("lam", [0.215, 3.0, 8.0])
def test_count_sampler_distribution(lam):
    rng = np.random.default_rng(17)
    n = 50000
    draws = np.array([poisson_from_uniform(rng.random(), lam)
                      for _ in range(n)])
    assert abs(draws.mean() - lam) < 4.0 * np.sqrt(lam / n)
    # per-value frequencies against the exact pmf, 4 sigma each
    for k in range(int(lam + 4.0 * np.sqrt(lam)) + 2):
        pk = sps.poisson.pmf(k, lam)
        if n * pk < 20:
            continue
        sigma = np.sqrt(n * pk * (1.0 - pk))
        assert abs(np.sum(draws == k) - n * pk) < 4.0 * sigma


def test_classify_threshold_edges():
    det = DetectorModel(threshold=2)
    assert classify(0, det) == 0
    assert classify(1, det) == 0
    assert classify(2, det) == 1
    assert classify(7, det) == 1


def test_probe_dark_with_ideal_detector():
    det = DetectorModel.ideal()
    rng = np.random.default_rng(23)
    for _ in range(200):
        out = probe(SpinState.dark(), det, NoiseParams(), rng)
        assert out.true_manifold == 0
        assert out.classified_bit == 0
        assert out.photon_count == 0
        assert out.post_state.ground_population == 1.0


def test_probe_certain_pump_moves_population_sideways():
    bright = apply_pulse(SpinState.dark(), PulseSpec(np.pi / 0.003, 0.003))
    noise = NoiseParams(zeeman_pump_prob=1.0)
    rng = np.random.default_rng(29)
    sides = [0, 0]
    for _ in range(2000):
        out = probe(bright, DetectorModel.ideal(), noise, rng)
        assert out.true_manifold == 1
        pops = out.post_state.populations
        assert pops[2] == 0.0
        sides[0 if pops[1] == 1.0 else 1] += 1
    assert abs(sides[0] - 1000) < 4.0 * np.sqrt(2000 * 0.25)


def test_probe_is_repeatable_even_from_pumped_states():
    # once projected the manifold answer must not change on the next look
    rng = np.random.default_rng(31)
    noise = NoiseParams(zeeman_pump_prob=0.3)
    det = DetectorModel.ideal()
    for _ in range(500):
        state = apply_pulse(SpinState.dark(),
                            PulseSpec(rng.uniform(0, 2000), 0.003,
                                      rng.uniform(-300, 300)))
        first = probe(state, det, noise, rng)
        second = probe(first.post_state, det, noise, rng)
        assert second.true_manifold == first.true_manifold


def test_false_rates_against_poisson_tails():
    det = DetectorModel()
    p_on, p_off = false_rates(det)
    assert abs(p_on - sps.poisson.sf(det.threshold - 1,
                                     det.mean_counts_dark)) < 1e-12
    assert abs(p_off - sps.poisson.cdf(det.threshold - 1,
                                       det.mean_counts_bright)) < 1e-12
    # frozen reference values for the default tube
    assert abs(p_on - 0.020052150184547757) < 1e-15
    assert abs(p_off - 0.003019163651122607) < 1e-15
    assert abs(p_off - 9.0 * np.exp(-8.0)) < 1e-15
    assert abs(p_on - 0.0200) < 1e-4
    assert abs(p_off - 0.0030) < 1e-4


def test_false_rates_ideal_detector_negligible():
    p_on, p_off = false_rates(DetectorModel.ideal())
    assert p_on == 0.0
    assert p_off < 1e-18


def test_classification_error_rates_converge():
    # hold the ion dark (theta = 0) and bright (failed preparation) and
    # compare observed misclassification rates with the closed-form tails
    det = DetectorModel()
    n = 200000
    counts, bits, manifolds = zeno_trajectory(
        np.random.default_rng(41).bit_generator, n,
        omega=0.0, tau=0.0049, delta=0.0, phase=0.0, probe_duration=0.002,
        lam_on=det.mean_counts_bright, lam_off=det.mean_counts_dark,
        k_th=det.threshold, gamma_phi=0.0, eps_z=0.0, f_prep=0.0,
        sink_zeeman=False, reprepare=False)
    assert np.all(manifolds == 0)
    p_on, p_off = false_rates(det)
    sigma = np.sqrt(n * p_on * (1.0 - p_on))
    assert abs(int(np.sum(bits)) - n * p_on) < 4.0 * sigma

    counts, bits, manifolds = zeno_trajectory(
        np.random.default_rng(43).bit_generator, n,
        omega=0.0, tau=0.0049, delta=0.0, phase=0.0, probe_duration=0.002,
        lam_on=det.mean_counts_bright, lam_off=det.mean_counts_dark,
        k_th=det.threshold, gamma_phi=0.0, eps_z=0.0, f_prep=1.0,
        sink_zeeman=False, reprepare=False)
    assert np.all(manifolds == 1)
    misses = n - int(np.sum(bits))
    sigma = np.sqrt(n * p_off * (1.0 - p_off))
    assert abs(misses - n * p_off) < 4.0 * sigma


def test_ideal_detector_never_misclassifies():
    det = DetectorModel.ideal()
    counts, bits, manifolds = zeno_trajectory(
        np.random.default_rng(47).bit_generator, 200000,
        omega=(np.pi / 2) / 0.0049, tau=0.0049, delta=0.0, phase=0.0,
        probe_duration=0.002, lam_on=det.mean_counts_bright,
        lam_off=det.mean_counts_dark, k_th=det.threshold, gamma_phi=0.0,
        eps_z=0.0, f_prep=0.0, sink_zeeman=False, reprepare=False)
    assert np.array_equal(bits, manifolds)
