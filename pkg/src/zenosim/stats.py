"""Run-length statistics, closed-form survival laws, and estimators.

The measurement record of an alternating drive/probe trajectory decomposes
into maximal runs of identical results.  For an ideal trajectory the
probability that an "off" run reaches length q falls geometrically with the
single-step survival cos^2(theta/2), so the log of the run-length tail is
linear in q and its slope recovers the pulse area theta.

For fractionated-pulse series the closed forms implemented here give the
survival after n pulses of area pi/n:

* selective_survival      all n probes say "off" (observation freezes the
                          ion; tends to 1 as n grows),
* intermediate_survival   the first n-1 probes say "off",
* nonselective_survival   the final probe says "off" when the intermediate
                          measurement results are discarded.

All closed forms are evaluated through the half-angle identity
cos^2(x/2) = (1 + cos x)/2, which keeps the small-n spot values exact in
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import acos, cos, exp, inf, log, pi, sqrt

import numpy as np

from .protocols import SeriesRecord


class FitUnderdeterminedError(ValueError):
    """Raised when a run-length histogram has no usable decay information."""


class InvalidCorrectionError(ValueError):
    """Raised when the requested error correction has a non-positive factor."""


@dataclass
class RunLengthHistogram:
    """Counts of maximal same-result runs, per outcome and exact length."""

    off_counts: dict[int, int]
    on_counts: dict[int, int]

    def counts(self, outcome: int) -> dict[int, int]:
        return self.off_counts if outcome == 0 else self.on_counts

    def total_runs(self, outcome: int) -> int:
        return sum(self.counts(outcome).values())

    def cumulative(self, outcome: int, q: int) -> int:
        """Number of runs of the outcome with length >= q."""
        if q < 1:
            raise ValueError("q must be >= 1")
        return sum(c for length, c in self.counts(outcome).items()
                   if length >= q)

    @property
    def total_length(self) -> int:
        """Total number of results the runs decompose (both outcomes)."""
        return (sum(q * c for q, c in self.off_counts.items())
                + sum(q * c for q, c in self.on_counts.items()))

    def max_length(self, outcome: int) -> int:
        c = self.counts(outcome)
        return max(c) if c else 0


def extract_runs(bits) -> RunLengthHistogram:
    """Decompose a 0/1 result sequence into its maximal-run histogram."""
    b = np.asarray(bits).ravel()
    if b.size and not np.all((b == 0) | (b == 1)):
        raise ValueError("bits must contain only 0 and 1")
    if b.size == 0:
        return RunLengthHistogram(off_counts={}, on_counts={})
    change = np.flatnonzero(np.diff(b))
    starts = np.concatenate(([0], change + 1))
    ends = np.concatenate((change + 1, [b.size]))
    lengths = ends - starts
    values = b[starts]
    hist = RunLengthHistogram(off_counts={}, on_counts={})
    for outcome in (0, 1):
        qs, cs = np.unique(lengths[values == outcome], return_counts=True)
        hist.counts(outcome).update(
            (int(q), int(c)) for q, c in zip(qs, cs))
    return hist


def combine_runs(a: RunLengthHistogram,
                 b: RunLengthHistogram) -> RunLengthHistogram:
    """Merge the run histograms of independently recorded trajectories."""
    merged = RunLengthHistogram(off_counts=dict(a.off_counts),
                                on_counts=dict(a.on_counts))
    for outcome in (0, 1):
        target = merged.counts(outcome)
        for q, c in b.counts(outcome).items():
            target[q] = target.get(q, 0) + c
    return merged


def sequence_ratio(hist: RunLengthHistogram, q: int, outcome: int = 0) -> float:
    """Fraction of the outcome's runs that reach length q: N(>=q)/N(>=1)."""
    n1 = hist.cumulative(outcome, 1)
    if n1 == 0:
        raise ValueError("histogram has no runs of the requested outcome")
    return hist.cumulative(outcome, q) / n1


@dataclass(frozen=True)
class RatioRow:
    q: int
    count: int
    ratio: float
    sigma: float
    theory: float | None


def ratio_table(hist: RunLengthHistogram, outcome: int = 0,
                q_max: int | None = None,
                theta: float | None = None) -> list[RatioRow]:
    """Tabulate N(>=q)/N(>=1) with binomial sigma, optionally against theory.

    The theory column is the geometric tail cos^(2(q-1))(theta/2) when a
    pulse area is supplied (fitted or known).
    """
    n1 = hist.cumulative(outcome, 1)
    if n1 == 0:
        raise ValueError("histogram has no runs of the requested outcome")
    top = q_max if q_max is not None else hist.max_length(outcome)
    rows = []
    for q in range(1, top + 1):
        nq = hist.cumulative(outcome, q)
        ratio = nq / n1
        sigma = sqrt(ratio * (1.0 - ratio) / n1)
        theory = None if theta is None else run_survival(q - 1, theta)
        rows.append(RatioRow(q=q, count=nq, ratio=ratio, sigma=sigma,
                             theory=theory))
    return rows


# ---------------------------------------------------------------------------
# closed-form survival laws


def survival_probability(theta: float) -> float:
    """Probability cos^2(theta/2) that one pulse leaves the dark state dark."""
    return (1.0 + cos(theta)) / 2.0


def run_survival(q: int, theta: float) -> float:
    """Probability that q successive probed pulses all leave the ion dark."""
    if q < 0:
        raise ValueError("q must be >= 0")
    return survival_probability(theta) ** q


def _half_angle_power(n: int, power: int) -> float:
    return ((1.0 + cos(pi / n)) / 2.0) ** power


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")


def selective_survival(n: int) -> float:
    """P(all n probes read "off") for n probed pulses of area pi/n."""
    _check_n(n)
    return _half_angle_power(n, n)


def intermediate_survival(n: int) -> float:
    """P(the first n-1 probes read "off") for n pulses of area pi/n."""
    _check_n(n)
    return _half_angle_power(n, n - 1)


def nonselective_survival(n: int) -> float:
    """P(final probe reads "off") when intermediate results are discarded.

    The n-1 unread projections still destroy the coherence between pulses,
    leaving the classical composition (1 + cos^n(pi/n))/2.
    """
    _check_n(n)
    return 0.5 * (1.0 + cos(pi / n) ** n)


# ---------------------------------------------------------------------------
# pulse-area fit from run lengths


@dataclass(frozen=True)
class ThetaFit:
    """Weighted through-origin fit of the log run-length tail.

    ``theta`` is reported in [0, pi]; the geometric decay cannot tell a
    rotation from its mirror, so ``alias`` (= 2*pi - theta) fits the data
    exactly as well and the caller must pick the physical branch.
    """

    theta: float
    sigma: float
    p: float
    log_slope: float
    log_slope_sigma: float
    chi2: float
    n_bins: int
    clamped: bool

    @property
    def alias(self) -> float:
        return 2.0 * pi - self.theta


def fit_theta(hist: RunLengthHistogram, outcome: int = 0) -> ThetaFit:
    """Estimate the pulse area from the decay of the run-length tail.

    Fits ln(N(>=q)/N(>=1)) = (q-1) * ln p by weighted least squares through
    the origin, with the nested-count variance 1/N(>=q) - 1/N(>=1) of each
    log ratio.  Bins with N(>=q) equal to 0 (no information) or to N(>=1)
    (zero estimated variance) are dropped; if nothing remains the fit is
    underdetermined.
    """
    n1 = hist.cumulative(outcome, 1)
    if n1 == 0:
        raise FitUnderdeterminedError("histogram has no runs to fit")
    sxx = 0.0
    sxy = 0.0
    points = []
    for q in range(2, hist.max_length(outcome) + 1):
        nq = hist.cumulative(outcome, q)
        if nq == 0 or nq == n1:
            continue
        x = float(q - 1)
        y = log(nq / n1)
        w = 1.0 / (1.0 / nq - 1.0 / n1)
        points.append((x, y, w))
        sxx += w * x * x
        sxy += w * x * y
    if not points:
        raise FitUnderdeterminedError(
            "run-length histogram has no bins between 0 and N(>=1); "
            "cannot determine a decay slope")
    slope = sxy / sxx
    slope_sigma = sqrt(1.0 / sxx)
    chi2 = sum(w * (y - slope * x) ** 2 for x, y, w in points)
    p = exp(slope)
    clamped = p > 1.0
    if clamped:
        p = 1.0
    theta = 2.0 * acos(sqrt(p))
    sigma = inf if p >= 1.0 else sqrt(p / (1.0 - p)) * slope_sigma
    return ThetaFit(theta=theta, sigma=sigma, p=p, log_slope=slope,
                    log_slope_sigma=slope_sigma, chi2=chi2,
                    n_bins=len(points), clamped=clamped)


# ---------------------------------------------------------------------------
# survival estimators for fractionated series


@dataclass(frozen=True)
class SurvivalEstimate:
    """A survival frequency with its binomial standard error.

    ``sigma`` always belongs to the headline number: the raw frequency
    until a correction is applied, the corrected one afterwards.
    """

    n: int
    n_series: int
    raw_frequency: float
    corrected_frequency: float | None
    sigma: float
    mode: str
    clamped: bool = False


def _estimate(records: list[SeriesRecord], n: int, mode: str,
              favourable) -> SurvivalEstimate:
    if not records:
        raise ValueError("no series records given")
    hits = sum(1 for r in records if favourable(r))
    n_series = len(records)
    freq = hits / n_series
    sigma = sqrt(freq * (1.0 - freq) / n_series)
    return SurvivalEstimate(n=n, n_series=n_series, raw_frequency=freq,
                            corrected_frequency=None, sigma=sigma, mode=mode)


def _check_intermediates(records: list[SeriesRecord], n: int) -> None:
    for r in records:
        if len(r.intermediate_bits) != n - 1:
            raise ValueError(
                f"records carry {len(r.intermediate_bits)} intermediate bits "
                f"but selective estimation at n={n} needs {n - 1} "
                "(was the run recorded without intermediate probes?)")


def estimate_selective(records: list[SeriesRecord], n: int) -> SurvivalEstimate:
    """Frequency of series whose n probe results all read "off"."""
    _check_intermediates(records, n)
    return _estimate(
        records, n, "selective",
        lambda r: r.final_bit == 0 and all(b == 0 for b in r.intermediate_bits))


def estimate_intermediate(records: list[SeriesRecord],
                          n: int) -> SurvivalEstimate:
    """Frequency of series whose first n-1 probe results all read "off"."""
    _check_intermediates(records, n)
    return _estimate(records, n, "intermediate",
                     lambda r: all(b == 0 for b in r.intermediate_bits))


def estimate_nonselective(records: list[SeriesRecord],
                          n: int) -> SurvivalEstimate:
    """Frequency of series whose final probe reads "off", ignoring the rest.

    Valid for runs with or without intermediate probing, so it applies to
    free-intermission series where only the final probe exists.
    """
    return _estimate(records, n, "nonselective", lambda r: r.final_bit == 0)


def correct_estimate(raw: float, f_prep: float, p_false_on: float,
                     n: int) -> tuple[float, bool]:
    """First-order correction of an all-off frequency for known defects.

    Divides out the fraction (1 - f_prep) of usable preparations and the
    first-order probability (1 - n * p_false_on) that none of the n "off"
    readings was flipped by a dark count.  Returns (corrected, clamped);
    the result is clamped into [0, 1] with the flag set when the raw value
    and the correction are inconsistent.
    """
    factor = (1.0 - f_prep) * (1.0 - n * p_false_on)
    if factor <= 0.0:
        raise InvalidCorrectionError(
            f"correction factor {factor!r} is not positive "
            f"(f_prep={f_prep!r}, p_false_on={p_false_on!r}, n={n})")
    corrected = raw / factor
    if corrected > 1.0:
        return 1.0, True
    if corrected < 0.0:
        return 0.0, True
    return corrected, False


def apply_correction(est: SurvivalEstimate, f_prep: float,
                     p_false_on: float) -> SurvivalEstimate:
    """Return a copy of ``est`` with the corrected frequency filled in.

    The number of "off" readings the correction concerns follows from the
    estimator mode: n for selective, n-1 for intermediate, 1 for
    nonselective.  The standard error is rescaled by the same factor.
    """
    n_probes = {"selective": est.n, "intermediate": est.n - 1,
                "nonselective": 1}[est.mode]
    corrected, clamped = correct_estimate(est.raw_frequency, f_prep,
                                          p_false_on, n_probes)
    factor = (1.0 - f_prep) * (1.0 - n_probes * p_false_on)
    return SurvivalEstimate(n=est.n, n_series=est.n_series,
                            raw_frequency=est.raw_frequency,
                            corrected_frequency=corrected,
                            sigma=est.sigma / factor, mode=est.mode,
                            clamped=clamped)
