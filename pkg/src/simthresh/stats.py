"""Distribution analysis over similarity scores.

Scores split into two sub-distributions: values between a text and its true
labels (alpha) and values between a text and every other label (beta).  The
analyses here compare such distributions across models, datasets and labels:
summaries, two-sample t-tests with Bonferroni correction, histogram-overlap
measurement, and Pearson correlation.

The t statistic and its degrees of freedom are computed from the standard
formulas; only the Student-t CDF is delegated to scipy.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import stdtr

from .data import Dataset, SimilarityMatrix, ValidationError

SIGNIFICANCE = 0.05


@dataclass(frozen=True)
class Scope:
    """Names the slice a distribution came from; purely descriptive."""

    model: str = ""
    dataset: str = ""
    label: str | None = None

    def id(self) -> str:
        parts = [p for p in (self.model, self.dataset, self.label) if p]
        return "/".join(parts) if parts else "all"


@dataclass(frozen=True)
class DistributionPair:
    """True-label (alpha) and non-true-label (beta) similarity values."""

    alpha: np.ndarray
    beta: np.ndarray
    scope: Scope = Scope()


def split_alpha_beta(
    sims: SimilarityMatrix,
    gold: Dataset,
    scope: Scope | None = None,
) -> DistributionPair:
    """Partition matrix entries by gold membership.

    With a label-restricted scope only that label's column is considered;
    otherwise every entry lands in exactly one of the two outputs, so
    |alpha| + |beta| = m*n.

    Raises:
        ValidationError: id mismatch or an unknown scope label.
    """
    scope = scope or Scope()
    if set(sims.text_ids) != set(gold.ids):
        raise ValidationError("similarity matrix and dataset cover different ids")
    index = {name: j for j, name in enumerate(sims.label_names)}
    mask = np.zeros(sims.shape, dtype=bool)
    for i, text_id in enumerate(sims.text_ids):
        for label in gold[text_id].gold_labels:
            if label in index:
                mask[i, index[label]] = True

    if scope.label is not None:
        if scope.label not in index:
            raise ValidationError(f"unknown label: {scope.label!r}")
        j = index[scope.label]
        col = sims.values[:, j]
        alpha = col[mask[:, j]]
        beta = col[~mask[:, j]]
    else:
        alpha = sims.values[mask]
        beta = sims.values[~mask]
    return DistributionPair(alpha=alpha.copy(), beta=beta.copy(), scope=scope)


def label_alpha_samples(sims: SimilarityMatrix, gold: Dataset) -> dict[str, np.ndarray]:
    """Per-label true-label similarity values, keyed by label name."""
    out = {}
    for name in sims.label_names:
        pair = split_alpha_beta(sims, gold, Scope(label=name))
        out[name] = pair.alpha
    return out


def summarize(values) -> dict[str, float]:
    """Mean, median, min and max of a non-empty sample."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValidationError("cannot summarize an empty sample")
    return {
        "mean": float(arr.mean()),
        "median": float(np.median(arr)),
        "min": float(arr.min()),
        "max": float(arr.max()),
    }


def welch_t_test(x, y, equal_var: bool = False) -> tuple[float, float]:
    """Two-sample t-test, unequal variances by default.

    Returns (t, two-sided p).  The pooled-variance variant is available via
    ``equal_var=True``.

    Raises:
        ValidationError: fewer than 2 values in either sample, or zero
            variability in both (the statistic is undefined).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    nx, ny = x.size, y.size
    if nx < 2 or ny < 2:
        raise ValidationError(f"need at least 2 values per sample, got {nx} and {ny}")
    mx, my = float(x.mean()), float(y.mean())
    vx = float(x.var(ddof=1))
    vy = float(y.var(ddof=1))

    if equal_var:
        pooled = ((nx - 1) * vx + (ny - 1) * vy) / (nx + ny - 2)
        se2 = pooled * (1.0 / nx + 1.0 / ny)
        df = float(nx + ny - 2)
    else:
        a, b = vx / nx, vy / ny
        se2 = a + b
        if se2 > 0.0:
            df = se2 * se2 / (a * a / (nx - 1) + b * b / (ny - 1))
        else:
            df = float(nx + ny - 2)
    if se2 == 0.0:
        raise ValidationError("zero variance in both samples; t is undefined")

    t = (mx - my) / math.sqrt(se2)
    p = 2.0 * float(stdtr(df, -abs(t)))
    return t, p


@dataclass(frozen=True)
class TestResult:
    """One pairwise comparison, before or after family-wise adjustment."""

    __test__ = False  # not a pytest class despite the name

    a: str
    b: str
    t: float
    p_raw: float
    p_adj: float | None = None
    significant: bool | None = None


def bonferroni(results, family_size: int) -> list[TestResult]:
    """Adjusted p = min(1, raw x family size); significance at 0.05.

    Raises:
        ValidationError: family_size < 1.
    """
    if family_size < 1:
        raise ValidationError(f"family size must be >= 1, got {family_size}")
    adjusted = []
    for r in results:
        p_adj = min(1.0, r.p_raw * family_size)
        adjusted.append(replace(r, p_adj=p_adj, significant=p_adj < SIGNIFICANCE))
    return adjusted


def h_test_suite(
    named_samples: dict,
    equal_var: bool = False,
    level: str = "",
) -> dict:
    """All pairwise t-tests over named distributions, Bonferroni-corrected.

    The Bonferroni family is the number of pairs actually tested.  Samples
    too small to test (fewer than 2 values) are dropped and reported under
    "skipped".  ``level`` is carried through to the report verbatim
    (conventionally models, datasets or labels).

    Raises:
        ValidationError: fewer than 2 testable distributions.
    """
    usable = {}
    skipped = []
    for name in named_samples:
        arr = np.asarray(named_samples[name], dtype=np.float64)
        if arr.size < 2:
            skipped.append(name)
        else:
            usable[name] = arr
    if len(usable) < 2:
        raise ValidationError(
            f"need at least 2 distributions with >= 2 values, have {len(usable)}"
        )

    names = sorted(usable)
    raw = []
    for a, b in itertools.combinations(names, 2):
        t, p = welch_t_test(usable[a], usable[b], equal_var=equal_var)
        raw.append(TestResult(a=a, b=b, t=t, p_raw=p))
    family = len(raw)
    results = bonferroni(raw, family)
    n_sig = sum(1 for r in results if r.significant)
    return {
        "level": level,
        "family_size": family,
        "pairs": results,
        "proportion_significant": n_sig / family,
        "skipped": sorted(skipped),
        "summaries": {name: summarize(usable[name]) for name in names},
    }


def overlap(alpha, beta, bin_width: float = 0.01, value_range=(-1.0, 1.0)) -> float:
    """Histogram intersection of two samples on a fixed binning.

    Both samples are histogrammed as probability masses over ``value_range``
    with ``bin_width`` bins (values outside the range are clipped to its
    edges); the overlap is the summed bin-wise minimum, in [0, 1].

    Raises:
        ValidationError: empty input or a non-positive bin width.
    """
    a = np.asarray(alpha, dtype=np.float64)
    b = np.asarray(beta, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValidationError("overlap requires two non-empty samples")
    if bin_width <= 0:
        raise ValidationError(f"bin width must be positive, got {bin_width}")
    lo, hi = float(value_range[0]), float(value_range[1])
    if not lo < hi:
        raise ValidationError(f"bad value range: [{lo}, {hi}]")
    nbins = max(1, int(round((hi - lo) / bin_width)))
    a = np.clip(a, lo, hi)
    b = np.clip(b, lo, hi)
    ca, _ = np.histogram(a, bins=nbins, range=(lo, hi))
    cb, _ = np.histogram(b, bins=nbins, range=(lo, hi))
    pa = ca / a.size
    pb = cb / b.size
    return float(np.minimum(pa, pb).sum())


def pearson(x, y) -> float:
    """Sample Pearson correlation, clamped to [-1, 1].

    Raises:
        ValidationError: length mismatch, fewer than 2 points, or zero
            variance in either input.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise ValidationError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValidationError("pearson needs at least 2 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise ValidationError("pearson undefined for a zero-variance input")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))
