"""Decision-threshold selection and label assignment.

Four strategies produce a ThresholdProfile:

* ``fixed05``: 0.5 for every label, no calibration.
* ``norm05``: min-max normalize scores with constants frozen from the
  validation matrix, then 0.5 on the normalized scale.
* ``uniform``: one shared threshold, the grid point maximizing validation
  macro-F1.
* ``label_specific``: per-label thresholds, each the grid point maximizing
  that label's positive-class F1; labels without validation positives fall
  back to the mean of the calibrated thresholds.

Assignment is boundary-inclusive in the metric's own direction: a label is
assigned when the score equals or exceeds the threshold under cosine, or
equals or falls below it under Euclidean distance.

Every F1 here flows through :func:`f1_from_counts`, and evaluation reuses the
same helper, so the dominance chain (label-specific >= uniform >= any fixed
grid threshold, as validation macro-F1) holds as an exact float comparison,
not merely within tolerance.
"""

from __future__ import annotations

import numpy as np

from .data import (
    Dataset,
    LabelCatalog,
    Prediction,
    PredictionSet,
    SimilarityMatrix,
    ThresholdGrid,
    ThresholdProfile,
    ValidationError,
)
from .metrics import f1_from_counts

TIE_BREAKS = ("low", "high")


def direction_for(metric: str) -> str:
    return "geq" if metric == "cosine" else "leq"


def _as_mask(length: int, positives) -> np.ndarray:
    mask = np.zeros(length, dtype=bool)
    arr = np.asarray(positives)
    if arr.dtype == bool:
        if arr.shape != (length,):
            raise ValidationError("positive mask length mismatch")
        return arr
    idx = sorted(int(i) for i in positives)
    if idx and (idx[0] < 0 or idx[-1] >= length):
        raise ValidationError("positive index out of range")
    mask[idx] = True
    return mask


def _counts_over_grid(scores, pos_mask, grid_points, direction):
    """TP/FP/FN integer counts for every grid point at once."""
    scores = np.asarray(scores, dtype=np.float64)
    if direction == "geq":
        pred = scores[None, :] >= grid_points[:, None]
    elif direction == "leq":
        pred = scores[None, :] <= grid_points[:, None]
    else:
        raise ValidationError(f"unknown direction: {direction!r}")
    tp = (pred & pos_mask[None, :]).sum(axis=1)
    fp = (pred & ~pos_mask[None, :]).sum(axis=1)
    fn = int(pos_mask.sum()) - tp
    return tp, fp, fn


def f1_curve(scores, positives, grid: ThresholdGrid, direction: str = "geq"):
    """Positive-class F1 at every grid point, as a list of (theta, f1).

    ``positives`` is a set of indices into ``scores`` or a boolean mask.

    Raises:
        ValidationError: no positive instances (the curve is undefined).
    """
    scores = np.asarray(scores, dtype=np.float64)
    pos = _as_mask(len(scores), positives)
    if not pos.any():
        raise ValidationError("f1_curve requires at least one positive instance")
    pts = grid.points()
    tp, fp, fn = _counts_over_grid(scores, pos, pts, direction)
    return [
        (float(t), f1_from_counts(int(a), int(b), int(c)))
        for t, a, b, c in zip(pts, tp, fp, fn)
    ]


def _argbest(f1s, tie_break: str) -> int:
    if tie_break not in TIE_BREAKS:
        raise ValidationError(f"unknown tie break: {tie_break!r}")
    best = 0
    for k in range(1, len(f1s)):
        if f1s[k] > f1s[best] or (tie_break == "high" and f1s[k] == f1s[best]):
            best = k
    return best


def _positives_matrix(sims: SimilarityMatrix, gold: Dataset) -> np.ndarray:
    if set(sims.text_ids) != set(gold.ids):
        raise ValidationError("similarity matrix and dataset cover different ids")
    if tuple(sims.label_names) != gold.catalog.names:
        raise ValidationError(
            "similarity matrix columns do not match the catalog label order"
        )
    index = gold.catalog.index
    pos = np.zeros(sims.shape, dtype=bool)
    for i, text_id in enumerate(sims.text_ids):
        for label in gold[text_id].gold_labels:
            pos[i, index(label)] = True
    return pos


def default_grid_for(sims: SimilarityMatrix, grid: ThresholdGrid | None) -> ThresholdGrid:
    """The caller's grid, or the metric's natural default.

    Cosine uses the canonical [0, 1] grid in steps of 0.01.  Euclidean
    distances are unbounded, so the default spans the observed validation
    range with the same 101-point resolution; a constant-distance matrix
    degenerates to a unit-wide grid anchored at that constant.
    """
    if grid is not None:
        return grid
    if sims.metric == "cosine":
        return ThresholdGrid()
    if sims.values.size == 0:
        return ThresholdGrid()
    lo = float(sims.values.min())
    hi = float(sims.values.max())
    if hi <= lo:
        return ThresholdGrid(lo, lo + 1.0, 0.01)
    return ThresholdGrid(lo, hi, (hi - lo) / 100.0)


def calibrate_fixed(
    kind: str,
    sims_val: SimilarityMatrix,
    catalog: LabelCatalog,
    grid: ThresholdGrid | None = None,
) -> ThresholdProfile:
    """The two calibration-free baselines: fixed 0.5 and normalized 0.5.

    ``norm05`` records the validation min/max so that prediction rescales
    test scores with the same constants before comparing to 0.5.  A constant
    validation matrix freezes a degenerate (c, c) pair; normalization then
    maps everything to 0.0.
    """
    if kind not in ("fixed05", "norm05"):
        raise ValidationError(f"unknown fixed profile kind: {kind!r}")
    grid = grid if grid is not None else ThresholdGrid()
    norm_stats = None
    if kind == "norm05":
        if sims_val.values.size == 0:
            raise ValidationError("norm05 needs a non-empty validation matrix")
        norm_stats = (float(sims_val.values.min()), float(sims_val.values.max()))
    return ThresholdProfile(
        method=kind,
        metric=sims_val.metric,
        per_label={name: 0.5 for name in catalog.names},
        fallback=0.5,
        grid=grid,
        tie_break="low",
        norm_stats=norm_stats,
    )


def calibrate_uniform(
    sims_val: SimilarityMatrix,
    gold_val: Dataset,
    grid: ThresholdGrid | None = None,
    tie_break: str = "low",
) -> ThresholdProfile:
    """One shared threshold: the grid point with the best validation macro-F1.

    Macro-F1 averages every catalog label (absent labels contribute 0), in
    catalog order, exactly as evaluation does.  Ties go to the smallest grid
    point unless ``tie_break="high"``.

    Raises:
        ValidationError: empty validation set, or no label with any positive.
    """
    if len(gold_val) == 0:
        raise ValidationError("cannot calibrate on an empty validation set")
    grid = default_grid_for(sims_val, grid)
    pos = _positives_matrix(sims_val, gold_val)
    if not pos.any():
        raise ValidationError("no validation instance carries any label")
    pts = grid.points()
    direction = direction_for(sims_val.metric)

    n_labels = len(sims_val.label_names)
    totals = [0.0] * len(pts)
    for j in range(n_labels):
        tp, fp, fn = _counts_over_grid(sims_val.values[:, j], pos[:, j], pts, direction)
        for k in range(len(pts)):
            totals[k] += f1_from_counts(int(tp[k]), int(fp[k]), int(fn[k]))
    macro = [t / n_labels for t in totals]
    best = _argbest(macro, tie_break)
    theta = float(pts[best])
    return ThresholdProfile(
        method="uniform",
        metric=sims_val.metric,
        per_label={name: theta for name in sims_val.label_names},
        fallback=theta,
        grid=grid,
        tie_break=tie_break,
    )


def calibrate_label_specific(
    sims_val: SimilarityMatrix,
    gold_val: Dataset,
    grid: ThresholdGrid | None = None,
    tie_break: str = "low",
) -> ThresholdProfile:
    """Per-label thresholds maximizing each label's positive-class F1.

    Labels with no validation positive are left out of the per-label map and
    resolve to the fallback: the arithmetic mean of all calibrated
    thresholds.

    Raises:
        ValidationError: empty validation set, or no label at all with a
            positive (the fallback would be undefined).
    """
    if len(gold_val) == 0:
        raise ValidationError("cannot calibrate on an empty validation set")
    grid = default_grid_for(sims_val, grid)
    pos = _positives_matrix(sims_val, gold_val)
    pts = grid.points()
    direction = direction_for(sims_val.metric)

    per_label: dict[str, float] = {}
    for j, name in enumerate(sims_val.label_names):
        if not pos[:, j].any():
            continue
        tp, fp, fn = _counts_over_grid(sims_val.values[:, j], pos[:, j], pts, direction)
        f1s = [f1_from_counts(int(a), int(b), int(c)) for a, b, c in zip(tp, fp, fn)]
        per_label[name] = float(pts[_argbest(f1s, tie_break)])

    if not per_label:
        raise ValidationError(
            "no label has a validation positive; fallback threshold is undefined"
        )
    fallback = sum(per_label.values()) / len(per_label)
    return ThresholdProfile(
        method="label_specific",
        metric=sims_val.metric,
        per_label=per_label,
        fallback=fallback,
        grid=grid,
        tie_break=tie_break,
    )


def calibrate(
    method: str,
    sims_val: SimilarityMatrix,
    gold_val: Dataset,
    grid: ThresholdGrid | None = None,
    tie_break: str = "low",
) -> ThresholdProfile:
    """Dispatch on the method name used by profiles and the command line."""
    if method in ("fixed05", "norm05"):
        return calibrate_fixed(method, sims_val, gold_val.catalog, grid)
    if method == "uniform":
        return calibrate_uniform(sims_val, gold_val, grid, tie_break)
    if method == "label_specific":
        return calibrate_label_specific(sims_val, gold_val, grid, tie_break)
    raise ValidationError(f"unknown threshold method: {method!r}")


def predict(sims: SimilarityMatrix, profile: ThresholdProfile) -> PredictionSet:
    """Assign labels by thresholding each score in the metric's direction.

    Expects raw (unnormalized) scores; a norm05 profile rescales them here
    with its frozen validation constants before the 0.5 comparison.  The
    emitted scores are always the raw inputs.  Empty predicted sets are
    legal.

    Raises:
        ValidationError: metric mismatch between matrix and profile.
    """
    if sims.metric != profile.metric:
        raise ValidationError(
            f"matrix metric {sims.metric!r} does not match profile metric "
            f"{profile.metric!r}"
        )
    values = sims.values
    compare = values
    if profile.method == "norm05":
        if profile.norm_stats is None:
            raise ValidationError("norm05 profile is missing its frozen min/max")
        lo, hi = profile.norm_stats
        if hi == lo:
            compare = np.zeros_like(values)
        else:
            compare = (values - lo) / (hi - lo)

    theta = np.array(
        [profile.threshold_for(name) for name in sims.label_names], dtype=np.float64
    )
    if direction_for(sims.metric) == "geq":
        assigned = compare >= theta[None, :]
    else:
        assigned = compare <= theta[None, :]

    predictions = []
    names = sims.label_names
    for i, text_id in enumerate(sims.text_ids):
        chosen = frozenset(names[j] for j in np.nonzero(assigned[i])[0])
        scores = {names[j]: float(values[i, j]) for j in range(len(names))}
        predictions.append(Prediction(id=text_id, predicted=chosen, scores=scores))
    return PredictionSet(predictions)
