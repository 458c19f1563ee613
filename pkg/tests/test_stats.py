"""Statistics tests: run decomposition, survival laws, fits, corrections."""

from math import acos, cos, log, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenosim.protocols import SeriesRecord
from zenosim.stats import (
    FitUnderdeterminedError,
    InvalidCorrectionError,
    RunLengthHistogram,
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


def test_extract_runs_examples():
    hist = extract_runs([0, 0, 0, 1, 1, 0])
    assert hist.off_counts == {3: 1, 1: 1}
    assert hist.on_counts == {2: 1}
    assert extract_runs([]).off_counts == {}
    assert extract_runs([0, 0]).off_counts == {2: 1}
    assert extract_runs([1]).on_counts == {1: 1}
    with pytest.raises(ValueError):
        extract_runs([0, 2, 1])


@given(st.lists(st.integers(min_value=0, max_value=1), max_size=300))
@settings(max_examples=300, deadline=None)
def test_extract_runs_invariants(bits):
    hist = extract_runs(bits)
    # runs tile the record exactly
    assert hist.total_length == len(bits)
    # runs of the two outcomes alternate
    n_off = hist.total_runs(0)
    n_on = hist.total_runs(1)
    assert abs(n_off - n_on) <= 1
    for outcome in (0, 1):
        assert hist.cumulative(outcome, 1) == hist.total_runs(outcome)
        top = hist.max_length(outcome)
        assert hist.cumulative(outcome, top + 1) == 0


def test_cumulative_counts_and_ratios():
    hist = extract_runs([0, 0, 0, 1, 1, 0])
    assert hist.cumulative(0, 1) == 2
    assert hist.cumulative(0, 2) == 1
    assert hist.cumulative(0, 4) == 0
    assert sequence_ratio(hist, 1) == 1.0
    assert sequence_ratio(hist, 2) == 0.5
    assert sequence_ratio(hist, 3) == 0.5
    assert sequence_ratio(hist, 2, outcome=1) == 1.0
    with pytest.raises(ValueError):
        hist.cumulative(0, 0)
    with pytest.raises(ValueError):
        sequence_ratio(RunLengthHistogram({}, {}), 1)


def test_combine_runs_adds_counts():
    a = extract_runs([0, 0, 1])
    b = extract_runs([0, 1, 1])
    merged = combine_runs(a, b)
    assert merged.off_counts == {2: 1, 1: 1}
    assert merged.on_counts == {1: 1, 2: 1}
    # inputs untouched
    assert a.off_counts == {2: 1}


def test_survival_law_spot_values_are_exact():
    assert selective_survival(1) == 0.0
    assert intermediate_survival(1) == 1.0
    assert nonselective_survival(1) == 0.0
    assert selective_survival(2) == 0.25
    assert intermediate_survival(2) == 0.5
    assert nonselective_survival(2) == 0.5


def test_survival_law_frozen_values():
    assert abs(selective_survival(3) - 0.421875) < 1e-15
    assert abs(selective_survival(5) - 0.6054290497131066) < 1e-15
    assert abs(selective_survival(9) - 0.7591476665785695) < 1e-15
    assert abs(intermediate_survival(9) - 0.7827504816417608) < 1e-15
    assert abs(nonselective_survival(9) - 0.7856553434276254) < 1e-15


def test_survival_law_orderings_and_limits():
    prev = -1.0
    for n in range(1, 60):
        s = selective_survival(n)
        assert s > prev  # freezing gets monotonically more effective
        prev = s
        assert intermediate_survival(n) >= s
        if n > 1:
            assert nonselective_survival(n) > s
    assert selective_survival(10000) > 0.999
    assert nonselective_survival(10000) > 0.999
    for bad in (0, -3, 2.5):
        with pytest.raises(ValueError):
            selective_survival(bad)


def test_run_survival_geometric():
    theta = 0.77
    p = survival_probability(theta)
    assert run_survival(0, theta) == 1.0
    for q in range(1, 8):
        assert abs(run_survival(q, theta) - p ** q) < 1e-15
    with pytest.raises(ValueError):
        run_survival(-1, theta)


def geometric_hist(n1_pow4: int):
    """Histogram whose cumulative counts are exactly N1 * 4^-(q-1)."""
    cum = [4 ** k for k in range(n1_pow4, -1, -1)]
    counts = {}
    for q in range(1, len(cum)):
        c = cum[q - 1] - cum[q]
        counts[q] = c
    counts[len(cum)] = cum[-1]
    return RunLengthHistogram(off_counts=counts, on_counts={})


def test_fit_theta_recovers_exact_geometric_decay():
    hist = geometric_hist(6)
    fit = fit_theta(hist)
    assert abs(fit.log_slope - log(0.25)) < 1e-12
    assert abs(fit.p - 0.25) < 1e-12
    assert abs(fit.theta - 2.0 * acos(0.5)) < 1e-12
    assert abs(fit.theta - 2.0 * pi / 3.0) < 1e-12
    assert fit.chi2 < 1e-18
    assert fit.n_bins == 6
    assert not fit.clamped
    assert abs(fit.alias - (2.0 * pi - fit.theta)) < 1e-15


def test_fit_theta_sigma_scales_with_duplication():
    hist = geometric_hist(6)
    single = fit_theta(hist)
    double = fit_theta(combine_runs(hist, hist))
    assert abs(double.theta - single.theta) < 1e-12
    assert abs(double.log_slope_sigma * sqrt(2.0)
               - single.log_slope_sigma) < 1e-15
    assert abs(double.sigma * sqrt(2.0) - single.sigma) < 1e-12


def test_fit_theta_underdetermined_cases():
    with pytest.raises(FitUnderdeterminedError):
        fit_theta(RunLengthHistogram({}, {}))
    # only length-1 runs: no decay information at all
    with pytest.raises(FitUnderdeterminedError):
        fit_theta(RunLengthHistogram({1: 500}, {}))
    # a single long run: every cumulative count equals N(>=1)
    with pytest.raises(FitUnderdeterminedError):
        fit_theta(extract_runs([0] * 100))


def test_ratio_table_columns():
    hist = geometric_hist(3)
    theta = 2.0 * pi / 3.0
    rows = ratio_table(hist, theta=theta)
    assert [r.q for r in rows] == [1, 2, 3, 4]
    assert rows[0].ratio == 1.0
    assert rows[0].theory == 1.0
    for row in rows:
        assert row.count == hist.cumulative(0, row.q)
        assert abs(row.ratio - 0.25 ** (row.q - 1)) < 1e-12
        assert abs(row.theory - run_survival(row.q - 1, theta)) < 1e-15
    short = ratio_table(hist, q_max=2)
    assert len(short) == 2
    assert short[1].theory is None


RECORDS = [
    SeriesRecord(True, (0, 0), 0),
    SeriesRecord(True, (0, 1), 0),
    SeriesRecord(True, (1, 0), 1),
    SeriesRecord(False, (0, 0), 1),
]


def test_estimators_count_the_right_events():
    sel = estimate_selective(RECORDS, 3)
    assert sel.raw_frequency == 0.25
    assert sel.mode == "selective"
    assert abs(sel.sigma - sqrt(0.25 * 0.75 / 4)) < 1e-15
    inter = estimate_intermediate(RECORDS, 3)
    assert inter.raw_frequency == 0.5
    nonsel = estimate_nonselective(RECORDS, 3)
    assert nonsel.raw_frequency == 0.5
    assert nonsel.n_series == 4


def test_estimators_validate_record_shape():
    short = [SeriesRecord(True, (), 0)]
    with pytest.raises(ValueError):
        estimate_selective(short, 3)
    with pytest.raises(ValueError):
        estimate_intermediate(short, 3)
    # the final-probe estimator does not need intermediate bits
    assert estimate_nonselective(short, 3).raw_frequency == 1.0
    with pytest.raises(ValueError):
        estimate_selective([], 1)


def test_correct_estimate_arithmetic():
    corrected, clamped = correct_estimate(0.615, 0.18, 0.02, 1)
    assert abs(corrected - 0.7653061224489796) < 1e-15
    assert not clamped
    corrected, clamped = correct_estimate(0.9, 0.18, 0.02, 5)
    assert corrected == 1.0 and clamped
    with pytest.raises(InvalidCorrectionError):
        correct_estimate(0.5, 0.18, 0.3, 4)
    with pytest.raises(InvalidCorrectionError):
        correct_estimate(0.5, 1.0, 0.0, 1)


def test_apply_correction_probe_count_follows_mode():
    f_prep, p_on = 0.18, 0.02
    sel = apply_correction(estimate_selective(RECORDS, 3), f_prep, p_on)
    factor = (1.0 - f_prep) * (1.0 - 3 * p_on)
    assert abs(sel.corrected_frequency - 0.25 / factor) < 1e-15
    assert abs(sel.sigma * factor - estimate_selective(RECORDS, 3).sigma) < 1e-15
    inter = apply_correction(estimate_intermediate(RECORDS, 3), f_prep, p_on)
    assert abs(inter.corrected_frequency
               - 0.5 / ((1 - f_prep) * (1 - 2 * p_on))) < 1e-15
    nonsel = apply_correction(estimate_nonselective(RECORDS, 3), f_prep, p_on)
    assert abs(nonsel.corrected_frequency
               - 0.5 / ((1 - f_prep) * (1 - p_on))) < 1e-15
    assert not nonsel.clamped


def test_apply_correction_clamps_inconsistent_input():
    records = [SeriesRecord(True, (), 0)] * 10
    est = estimate_nonselective(records, 1)
    out = apply_correction(est, 0.18, 0.02)
    assert out.corrected_frequency == 1.0
    assert out.clamped


def test_histogram_theory_consistency_large_sample():
    # geometric synthesis with a real rng, checked against the tail law
    rng = np.random.default_rng(123)
    theta = 1.1
    p = survival_probability(theta)
    lengths = rng.geometric(1.0 - p, size=40000)
    counts = {}
    for q in np.unique(lengths):
        counts[int(q)] = int(np.sum(lengths == q))
    hist = RunLengthHistogram(off_counts=counts, on_counts={})
    fit = fit_theta(hist)
    assert abs(fit.theta - theta) < 4.0 * fit.sigma
    assert abs(fit.p - p) < 0.01
