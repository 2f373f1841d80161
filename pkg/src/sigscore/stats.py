"""Goodness-of-fit pipeline on a scalar image descriptor.

Each image is reduced to its mean intensity.  The original (C1) and synthetic
(C2) descriptor samples then go through three tests:

* T1, Levene (median-centred, i.e. Brown-Forsythe) for equal variances,
* T2, D'Agostino-Pearson K^2 for normality of C2 (C1 is reported alongside),
* T3, Kruskal-Wallis for a common distribution.

:func:`interpret` maps the three accept/reject outcomes onto the codes
(a)-(f) and their reading.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .special import chi2_sf, f_sf
from .tensor_algebra import ContractError

__all__ = [
    "InsufficientSampleError",
    "DegenerateDataError",
    "TestResult",
    "Interpretation",
    "StatReport",
    "mean_intensity",
    "levene",
    "normality",
    "kruskal_wallis",
    "interpret",
    "run_pipeline",
    "MIN_NORMALITY_SAMPLES",
]

MIN_NORMALITY_SAMPLES = 20


class InsufficientSampleError(ContractError):
    pass


class DegenerateDataError(ContractError):
    pass


def _sample(x, name="sample") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ContractError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{name} contains non-finite values")
    return arr


def mean_intensity(image) -> float:
    """Global mean of all pixel values (channel mean, then spatial mean)."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.size == 0:
        raise ContractError("image is empty")
    return float(arr.mean())


def levene(a, b) -> tuple[float, float]:
    """Brown-Forsythe variant of Levene's test for two groups.

    Returns ``(W, p)`` with ``p`` from F(1, n_a + n_b - 2).
    """
    groups = [_sample(a, "first sample"), _sample(b, "second sample")]
    if min(g.size for g in groups) < 2:
        raise InsufficientSampleError("Levene's test needs at least 2 values per group")
    devs = [np.abs(g - np.median(g)) for g in groups]
    n = np.array([g.size for g in groups], dtype=float)
    total = n.sum()
    group_means = np.array([z.mean() for z in devs])
    grand = float(np.dot(n, group_means) / total)
    between = float(np.dot(n, (group_means - grand) ** 2))
    within = float(sum(np.sum((z - m) ** 2) for z, m in zip(devs, group_means)))
    k = len(groups)
    if within == 0.0:
        if between == 0.0:
            return 0.0, 1.0
        return math.inf, 0.0
    w = (total - k) / (k - 1) * between / within
    return w, f_sf(w, k - 1, total - k)


def _skew_z(x: np.ndarray) -> float:
    n = x.size
    d = x - x.mean()
    m2 = np.mean(d ** 2)
    b1 = np.mean(d ** 3) / m2 ** 1.5
    y = b1 * math.sqrt((n + 1) * (n + 3) / (6.0 * (n - 2)))
    beta2 = (3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3)
             / ((n - 2.0) * (n + 5) * (n + 7) * (n + 9)))
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    return delta * math.asinh(y / alpha)


def _kurtosis_z(x: np.ndarray) -> float:
    n = x.size
    d = x - x.mean()
    m2 = np.mean(d ** 2)
    b2 = np.mean(d ** 4) / m2 ** 2
    mean_b2 = 3.0 * (n - 1) / (n + 1)
    var_b2 = 24.0 * n * (n - 2) * (n - 3) / ((n + 1) ** 2 * (n + 3) * (n + 5))
    std = (b2 - mean_b2) / math.sqrt(var_b2)
    root_beta1 = (6.0 * (n * n - 5 * n + 2) / ((n + 7) * (n + 9))
                  * math.sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2) * (n - 3))))
    a = 6.0 + 8.0 / root_beta1 * (2.0 / root_beta1 + math.sqrt(1.0 + 4.0 / root_beta1 ** 2))
    denom = 1.0 + std * math.sqrt(2.0 / (a - 4.0))
    if denom == 0.0:
        raise DegenerateDataError("kurtosis transform undefined for this sample")
    term2 = math.copysign(((1.0 - 2.0 / a) / abs(denom)) ** (1.0 / 3.0), denom)
    return (1.0 - 2.0 / (9.0 * a) - term2) / math.sqrt(2.0 / (9.0 * a))


def normality(x) -> tuple[float, float]:
    """D'Agostino-Pearson omnibus test.

    Combines the normal-approximated skewness and kurtosis z-scores into
    ``K2 = z_skew^2 + z_kurt^2`` with a chi-square(2) p-value.
    """
    x = _sample(x)
    if x.size < MIN_NORMALITY_SAMPLES:
        raise InsufficientSampleError(
            f"normality test needs at least {MIN_NORMALITY_SAMPLES} values, got {x.size}")
    if np.ptp(x) == 0.0:
        raise DegenerateDataError("normality test undefined for a zero-variance sample")
    k2 = _skew_z(x) ** 2 + _kurtosis_z(x) ** 2
    return k2, chi2_sf(k2, 2)


def _midranks_doubled(pooled: np.ndarray) -> tuple[np.ndarray, list[int]]:
    # twice the mid-rank is always an integer, which keeps H exact
    order = np.argsort(pooled, kind="mergesort")
    ranks2 = np.empty(pooled.size, dtype=np.int64)
    ties = []
    values = pooled[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[j + 1] == values[i]:
            j += 1
        ranks2[order[i:j + 1]] = i + j + 2
        if j > i:
            ties.append(j - i + 1)
        i = j + 1
    return ranks2, ties


def kruskal_wallis(a, b) -> tuple[float, float]:
    """Kruskal-Wallis H on mid-ranks with tie correction; p from chi-square(1).

    The statistic is accumulated in exact rational arithmetic and rounded once.
    """
    groups = [_sample(a, "first sample"), _sample(b, "second sample")]
    pooled = np.concatenate(groups)
    m = pooled.size
    if m < 3:
        raise InsufficientSampleError("Kruskal-Wallis needs at least 3 values in total")
    ranks2, ties = _midranks_doubled(pooled)
    bounds = np.cumsum([0] + [g.size for g in groups])
    sum_sq = sum(Fraction(int(ranks2[lo:hi].sum()) ** 2, 4 * (hi - lo))
                 for lo, hi in zip(bounds[:-1], bounds[1:]))
    h = Fraction(12, m * (m + 1)) * sum_sq - 3 * (m + 1)
    correction = 1 - Fraction(sum(t ** 3 - t for t in ties), m ** 3 - m)
    if correction == 0:
        raise DegenerateDataError("all values are identical; Kruskal-Wallis is undefined")
    h = float(h / correction)
    return h, chi2_sf(h, len(groups) - 1)


_CODE_TEXT = {
    "a": "Variances are compatible (T1 accepted). This is needed, though not enough on "
         "its own, to say both sets share one distribution.",
    "b": "Variances differ (T1 rejected), so there is not enough evidence that both "
         "sets come from one distribution.",
    "c": "The synthetic descriptor still looks normal (T2 accepted): the generator is "
         "probably close to its initial noise, fidelity is likely low and the model "
         "needs more training.",
    "d": "The synthetic descriptor is no longer normal (T2 rejected): the generator has "
         "moved away from its initial noise and may be near the target.",
    "f": "The rank test rejects a common distribution (T3 rejected); the sets cannot be "
         "said to come from the same distribution.",
}

_E_WITH_A = ("The rank test accepts a common distribution (T3 accepted) and variances "
             "agree, so for this descriptor both sets are consistent with the same "
             "distribution.")
_E_WITHOUT_A = ("The rank test accepts a common distribution (T3 accepted) but variances "
                "differ, so the synthetic set is only a good approximation of the original.")


@dataclass(frozen=True)
class Interpretation:
    codes: tuple[str, str, str]
    prose: tuple[str, ...]

    @property
    def same_distribution(self) -> bool:
        return self.codes[0] == "a" and self.codes[2] == "e"

    def to_dict(self) -> dict:
        return {"codes": list(self.codes), "prose": list(self.prose)}


def interpret(t1_accept: bool, t2_accept: bool, t3_accept: bool) -> Interpretation:
    codes = ("a" if t1_accept else "b", "c" if t2_accept else "d", "e" if t3_accept else "f")
    prose = [_CODE_TEXT[codes[0]], _CODE_TEXT[codes[1]]]
    if t3_accept:
        prose.append(_E_WITH_A if t1_accept else _E_WITHOUT_A)
    else:
        prose.append(_CODE_TEXT["f"])
    return Interpretation(codes, tuple(prose))


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    accept: bool

    __test__ = False

    @classmethod
    def from_pair(cls, pair: tuple[float, float], alpha: float) -> "TestResult":
        stat, p = pair
        return cls(float(stat), float(p), bool(p >= alpha))

    def to_dict(self) -> dict:
        stat = self.statistic if math.isfinite(self.statistic) else None
        return {"statistic": stat, "p_value": self.p_value, "accept": self.accept}


@dataclass
class StatReport:
    t1: TestResult
    t2: TestResult
    t2_original: TestResult | None
    t3: TestResult
    interpretation: Interpretation
    alpha: float
    sample_sizes: tuple[int, int] = (0, 0)
    descriptor: str = "mean_intensity"
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "descriptor": self.descriptor,
            "sample_sizes": {"original": self.sample_sizes[0],
                             "synthetic": self.sample_sizes[1]},
            "t1_levene": self.t1.to_dict(),
            "t2_normality_synthetic": self.t2.to_dict(),
            "t2_normality_original": (self.t2_original.to_dict()
                                      if self.t2_original else None),
            "t3_kruskal_wallis": self.t3.to_dict(),
            "interpretation": self.interpretation.to_dict(),
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def pretty(self) -> str:
        def mark(r):
            return "accept" if r.accept else "reject"
        rows = [("T1 Levene", self.t1), ("T2 normality (synthetic)", self.t2)]
        if self.t2_original is not None:
            rows.append(("   normality (original)", self.t2_original))
        rows.append(("T3 Kruskal-Wallis", self.t3))
        lines = [f"alpha = {self.alpha}"]
        lines += [f"{name:<26} stat={r.statistic:<12.6g} p={r.p_value:<12.6g} {mark(r)}"
                  for name, r in rows]
        lines.append("codes: " + ", ".join(f"({c})" for c in self.interpretation.codes))
        lines += ["  " + p for p in self.interpretation.prose]
        return "\n".join(lines) + "\n"


def run_pipeline(original, synthetic, alpha: float = 0.05) -> StatReport:
    """T1-T3 on two descriptor samples plus the combined reading.

    Raises :class:`InsufficientSampleError` naming the failing test when a
    sample is too small.
    """
    if not 0.0 < alpha < 1.0:
        raise ContractError(f"alpha must lie in (0, 1), got {alpha}")
    c1 = _sample(original, "original descriptors")
    c2 = _sample(synthetic, "synthetic descriptors")
    for name, s in (("original", c1), ("synthetic", c2)):
        if s.size < MIN_NORMALITY_SAMPLES:
            raise InsufficientSampleError(
                f"T2 normality needs at least {MIN_NORMALITY_SAMPLES} {name} samples, "
                f"got {s.size}")
    notes = []
    t1 = TestResult.from_pair(levene(c1, c2), alpha)
    t2 = _normality_or_point_mass(c2, "synthetic", alpha, notes)
    t2o = _normality_or_point_mass(c1, "original", alpha, notes)
    t3 = TestResult.from_pair(kruskal_wallis(c1, c2), alpha)
    return StatReport(t1, t2, t2o, t3, interpret(t1.accept, t2.accept, t3.accept),
                      alpha, (c1.size, c2.size), extra={"notes": notes} if notes else {})


def _normality_or_point_mass(sample, name, alpha, notes) -> TestResult:
    # a constant sample is a point mass, which no normal law with positive variance fits
    try:
        return TestResult.from_pair(normality(sample), alpha)
    except DegenerateDataError:
        notes.append(f"{name} descriptors are constant; normality rejected outright")
        return TestResult(float("nan"), 0.0, False)
