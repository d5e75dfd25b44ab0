"""Multi-label stratified splitting and the learning-curve harness.

Splitting uses greedy iterative stratification: the label with the fewest
remaining unassigned instances is placed first, each of its instances going
to the part that still wants that label the most.  This keeps per-label
proportions as close to the requested fractions as the integer counts allow,
and is exactly proportional when the targets divide evenly.

All tie-breaking beyond the deterministic rules (label ties by catalog
order, instance iteration in dataset order, part ties by remaining desired
count then remaining capacity) is drawn from a generator seeded by the
caller, so a (dataset, fractions, seed) triple fully determines the split.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calibration import calibrate_label_specific, calibrate_uniform, predict
from .data import Dataset, SimilarityMatrix, ThresholdGrid, ValidationError
from .metrics import evaluate

DEFAULT_CURVE_SIZES = (10, 25, 50, 100, 250, 500)


def iterative_stratified_split(dataset: Dataset, fractions, seed: int = 42) -> list[Dataset]:
    """Partition a dataset into parts with per-label proportions preserved.

    Raises:
        ValidationError: empty dataset, non-positive fractions, or fractions
            not summing to 1 (tolerance 1e-9).
    """
    fractions = [float(f) for f in fractions]
    if len(dataset) == 0:
        raise ValidationError("cannot split an empty dataset")
    if not fractions or any(f <= 0 for f in fractions):
        raise ValidationError(f"fractions must be positive, got {fractions}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValidationError(f"fractions must sum to 1, got {sum(fractions)}")

    rng = np.random.default_rng(seed)
    docs = dataset.documents
    catalog = dataset.catalog
    n_parts = len(fractions)
    n_labels = len(catalog)

    label_counts = [0] * n_labels
    doc_label_idx = []
    for doc in docs:
        idx = sorted(catalog.index(l) for l in doc.gold_labels)
        doc_label_idx.append(idx)
        for j in idx:
            label_counts[j] += 1

    # remaining desired count of each label per part, and remaining capacity
    desired = [[fractions[p] * label_counts[j] for j in range(n_labels)]
               for p in range(n_parts)]
    capacity = [fractions[p] * len(docs) for p in range(n_parts)]

    assignment = [-1] * len(docs)
    remaining_by_label = [set() for _ in range(n_labels)]
    for i, idx in enumerate(doc_label_idx):
        for j in idx:
            remaining_by_label[j].add(i)

    def pick_part(key) -> int:
        best = max(key(p) for p in range(n_parts))
        tied = [p for p in range(n_parts) if key(p) == best]
        if len(tied) > 1:
            best_cap = max(capacity[p] for p in tied)
            tied = [p for p in tied if capacity[p] == best_cap]
        if len(tied) > 1:
            return tied[int(rng.integers(len(tied)))]
        return tied[0]

    while True:
        # rarest label still holding unassigned instances; ties by catalog order
        active = [(len(remaining_by_label[j]), j)
                  for j in range(n_labels) if remaining_by_label[j]]
        if not active:
            break
        _, label = min(active)
        for i in sorted(remaining_by_label[label]):
            part = pick_part(lambda p: desired[p][label])
            assignment[i] = part
            capacity[part] -= 1
            for j in doc_label_idx[i]:
                desired[part][j] -= 1
                remaining_by_label[j].discard(i)

    # unlabeled instances go wherever the most room is left
    for i, idx in enumerate(doc_label_idx):
        if assignment[i] == -1:
            part = pick_part(lambda p: capacity[p])
            assignment[i] = part
            capacity[part] -= 1

    parts = []
    for p in range(n_parts):
        members = [docs[i] for i in range(len(docs)) if assignment[i] == p]
        parts.append(Dataset(members, catalog))
    return parts


def subsample_stratified(dataset: Dataset, size: int, seed: int = 42) -> Dataset:
    """A stratified subset of exactly ``size`` documents, in dataset order.

    Built from a two-way stratified split at fraction size/N; the greedy
    split may land one or two documents off the exact size, so a final
    seeded trim or top-up enforces it.

    Raises:
        ValidationError: size outside [1, len(dataset)].
    """
    n = len(dataset)
    if not 1 <= size <= n:
        raise ValidationError(f"size must be in [1, {n}], got {size}")
    if size == n:
        return dataset

    f = size / n
    part = iterative_stratified_split(dataset, [f, 1.0 - f], seed)[0]
    ids = list(part.ids)
    adjust_rng = np.random.default_rng([seed, 1])
    while len(ids) > size:
        ids.pop(int(adjust_rng.integers(len(ids))))
    if len(ids) < size:
        chosen = set(ids)
        pool = [d for d in dataset.ids if d not in chosen]
        while len(ids) < size:
            k = int(adjust_rng.integers(len(pool)))
            ids.append(pool.pop(k))
    return dataset.subset(ids)


@dataclass(frozen=True)
class CurvePoint:
    """One (sample size, repeat) cell of a learning-curve run."""

    size: int
    repeat: int
    seed: int
    ok: bool
    macro_f1: float | None = None
    micro_f1: float | None = None
    p_at_1: float | None = None
    thresholds: dict[str, float] = field(default_factory=dict)
    fallback: float | None = None
    positives: dict[str, int] = field(default_factory=dict)
    reason: str = ""


@dataclass(frozen=True)
class LearningCurveResult:
    points: tuple[CurvePoint, ...]
    reference: dict  # uniform profile calibrated on the full validation set


def _positive_counts(sub: Dataset) -> dict[str, int]:
    counts = {name: 0 for name in sub.catalog.names}
    for doc in sub:
        for label in doc.gold_labels:
            counts[label] += 1
    return counts


def learning_curve(
    sims_val: SimilarityMatrix,
    gold_val: Dataset,
    sims_test: SimilarityMatrix,
    gold_test: Dataset,
    sizes=None,
    repeats: int = 5,
    base_seed: int = 42,
    grid: ThresholdGrid | None = None,
    tie_break: str = "low",
    macro_over: str = "all",
) -> LearningCurveResult:
    """Label-specific calibration quality as a function of validation size.

    For every size x repeat cell (seed = base_seed + repeat + 1000 * size
    index): subsample the validation set, calibrate label-specific
    thresholds on the subsample, evaluate on the full test set.  A cell
    whose subsample supports no calibration at all (no label with a
    positive) is recorded as failed with the reason, not raised.

    The uniform reference is calibrated once on the full validation set.
    With size equal to the full validation size, a cell reproduces the
    standard pipeline result exactly.
    """
    n_val = len(gold_val)
    if sizes is None:
        sizes = [s for s in DEFAULT_CURVE_SIZES if s < n_val] + [n_val]
    sizes = sorted(set(int(s) for s in sizes))
    bad = [s for s in sizes if not 1 <= s <= n_val]
    if bad:
        raise ValidationError(f"sizes out of range [1, {n_val}]: {bad}")
    if repeats < 1:
        raise ValidationError(f"repeats must be >= 1, got {repeats}")

    ref_profile = calibrate_uniform(sims_val, gold_val, grid, tie_break)
    ref_report = evaluate(
        predict(sims_test, ref_profile), gold_test, macro_over, sims=sims_test
    )
    reference = {
        "theta": ref_profile.fallback,
        "macro_f1": ref_report.macro_f1,
        "micro_f1": ref_report.micro_f1,
        "p_at_1": ref_report.p_at_1,
    }

    points = []
    for size_index, size in enumerate(sizes):
        for repeat in range(repeats):
            seed = base_seed + repeat + 1000 * size_index
            sub = subsample_stratified(gold_val, size, seed)
            sub_sims = sims_val.select_texts(sub.ids)
            try:
                profile = calibrate_label_specific(sub_sims, sub, grid, tie_break)
            except ValidationError as exc:
                points.append(CurvePoint(
                    size=size, repeat=repeat, seed=seed, ok=False,
                    positives=_positive_counts(sub), reason=str(exc),
                ))
                continue
            report = evaluate(
                predict(sims_test, profile), gold_test, macro_over, sims=sims_test
            )
            points.append(CurvePoint(
                size=size, repeat=repeat, seed=seed, ok=True,
                macro_f1=report.macro_f1, micro_f1=report.micro_f1,
                p_at_1=report.p_at_1,
                thresholds=dict(profile.per_label), fallback=profile.fallback,
                positives=_positive_counts(sub),
            ))

    points.sort(key=lambda p: (p.size, p.repeat))
    return LearningCurveResult(points=tuple(points), reference=reference)


def curve_csv_text(result: LearningCurveResult) -> str:
    """Plot-ready rows; failed points leave their metric cells empty."""
    def cell(v):
        return "" if v is None else repr(float(v))

    lines = ["size,repeat,seed,maF1,miF1,p_at_1"]
    for p in result.points:
        lines.append(
            f"{p.size},{p.repeat},{p.seed},"
            f"{cell(p.macro_f1)},{cell(p.micro_f1)},{cell(p.p_at_1)}"
        )
    return "\n".join(lines) + "\n"
