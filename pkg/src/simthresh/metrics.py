"""Evaluation: per-label reports, macro/micro F1, P@k, and the multi-label
confusion matrix with sentinel axes.

The confusion matrix follows the allocation rules below, per instance with
true set T and predicted set P:

* every t in both T and P adds 1 to the diagonal cell (t, t);
* every missed t (in T but not P) splits 1 evenly across the spurious
  predictions P minus T, or lands in the NPL column when there are none;
* when nothing was missed but spurious predictions exist, each adds 1 to the
  NTL row; an instance with no true labels books all its predictions there,
  and (NTL, NPL) records the fully empty case.

Cells accumulate as exact rationals so that the total mass booked to the
true-label rows equals the number of gold assignments exactly, even when
the 1/|P-T| splits are not representable in binary floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .data import (
    Dataset,
    LabelCatalog,
    PredictionSet,
    SimilarityMatrix,
    ValidationError,
    atomic_write_text,
)

NTL = "NTL"
NPL = "NPL"


def f1_from_counts(tp: int, fp: int, fn: int) -> float:
    """Positive-class F1 = 2TP/(2TP+FP+FN); 0.0 when the denominator is 0.

    Calibration and evaluation both route every F1 through this function, so
    a threshold chosen as an argmax over grid points scores identically when
    re-evaluated, making dominance comparisons exact rather than approximate.
    """
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2 * tp / denom


@dataclass(frozen=True)
class EvalReport:
    """Per-label and aggregate scores for one prediction run.

    ``per_label`` maps each catalog label to precision/recall/f1/support and
    its raw tp/fp/fn counts.  ``macro_f1`` is the unweighted mean over the
    labels selected by ``macro_over`` ("all" catalog labels, or only those
    "present" with nonzero support).  ``micro_f1`` comes from the pooled
    counts.  ``p_at_1`` is None when no scores were available to rank.
    """

    per_label: dict[str, dict[str, float]]
    macro_f1: float
    micro_f1: float
    p_at_1: float | None
    pooled: dict[str, int]
    macro_over: str = "all"

    def to_json_dict(self) -> dict:
        return {
            "per_label": self.per_label,
            "macro_f1": self.macro_f1,
            "micro_f1": self.micro_f1,
            "p_at_1": self.p_at_1,
            "pooled": self.pooled,
            "macro_over": self.macro_over,
        }

    def summary_line(self) -> str:
        p1 = "n/a" if self.p_at_1 is None else f"{100 * self.p_at_1:.2f}"
        return (
            f"maF1={100 * self.macro_f1:.2f} "
            f"miF1={100 * self.micro_f1:.2f} P@1={p1}"
        )


def _check_alignment(pred_ids, gold_ids):
    missing = set(gold_ids) - set(pred_ids)
    extra = set(pred_ids) - set(gold_ids)
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"no prediction for: {sorted(missing)[:5]}")
        if extra:
            parts.append(f"prediction for unknown ids: {sorted(extra)[:5]}")
        raise ValidationError("; ".join(parts))


def evaluate(
    preds: PredictionSet,
    gold: Dataset,
    macro_over: str = "all",
    sims: SimilarityMatrix | None = None,
    metric: str | None = None,
) -> EvalReport:
    """Score predictions against gold label sets.

    P@1 is computed from ``sims`` when given; otherwise from the predictions'
    own score maps when they cover the whole catalog and ``metric`` names the
    ranking direction; otherwise it is left as None.

    Raises:
        ValidationError: prediction/gold id mismatch, or an unknown
            ``macro_over`` value.
    """
    if macro_over not in ("all", "present"):
        raise ValidationError(f"unknown macro_over: {macro_over!r}")
    _check_alignment(preds.ids, gold.ids)

    names = gold.catalog.names
    index = gold.catalog.index
    m, n = len(gold), len(names)
    gold_mat = np.zeros((m, n), dtype=bool)
    pred_mat = np.zeros((m, n), dtype=bool)
    for i, doc in enumerate(gold):
        for label in doc.gold_labels:
            gold_mat[i, index(label)] = True
        for label in preds[doc.id].predicted:
            pred_mat[i, index(label)] = True

    tp = (pred_mat & gold_mat).sum(axis=0)
    fp = (pred_mat & ~gold_mat).sum(axis=0)
    fn = (~pred_mat & gold_mat).sum(axis=0)

    per_label = {}
    f1s = []
    supports = []
    for j, name in enumerate(names):
        a, b, c = int(tp[j]), int(fp[j]), int(fn[j])
        support = a + c
        precision = a / (a + b) if a + b else 0.0
        recall = a / support if support else 0.0
        f1 = f1_from_counts(a, b, c)
        per_label[name] = {
            "precision": precision, "recall": recall, "f1": f1,
            "support": support, "tp": a, "fp": b, "fn": c,
        }
        f1s.append(f1)
        supports.append(support)

    if macro_over == "all":
        macro = sum(f1s) / n if n else 0.0
    else:
        chosen = [f for f, s in zip(f1s, supports) if s > 0]
        macro = sum(chosen) / len(chosen) if chosen else 0.0

    pooled = {"tp": int(tp.sum()), "fp": int(fp.sum()), "fn": int(fn.sum())}
    micro = f1_from_counts(pooled["tp"], pooled["fp"], pooled["fn"])

    p1 = None
    if sims is not None:
        p1 = precision_at_k(sims, gold, 1)
    elif metric is not None:
        built = _matrix_from_scores(preds, gold, metric)
        if built is not None:
            p1 = precision_at_k(built, gold, 1)

    return EvalReport(
        per_label=per_label, macro_f1=macro, micro_f1=micro,
        p_at_1=p1, pooled=pooled, macro_over=macro_over,
    )


def _matrix_from_scores(preds, gold, metric):
    names = gold.catalog.names
    rows = []
    for doc in gold:
        scores = preds[doc.id].scores
        if not all(name in scores for name in names):
            return None
        rows.append([scores[name] for name in names])
    values = np.asarray(rows, dtype=np.float64)
    return SimilarityMatrix(metric, values, gold.ids, names)


def precision_at_k(sims: SimilarityMatrix, gold: Dataset, k: int = 1) -> float:
    """Mean over instances of |top-k scored labels ∩ gold| / k.

    "Top" means highest similarity under cosine and smallest distance under
    Euclidean.  Rank ties resolve in catalog order.  An instance with no gold
    labels contributes 0.

    Raises:
        ValidationError: k out of [1, number of labels], empty matrix, or
            id mismatch.
    """
    n = len(sims.label_names)
    if k < 1 or k > n:
        raise ValidationError(f"k must be in [1, {n}], got {k}")
    if len(gold) == 0:
        raise ValidationError("precision_at_k needs at least one instance")
    _check_alignment(sims.text_ids, gold.ids)

    names = sims.label_names
    total = 0.0
    for doc in gold:
        row = sims.row(doc.id)
        keys = -row if sims.metric == "cosine" else row
        top = np.argsort(keys, kind="stable")[:k]
        hits = sum(1 for j in top if names[j] in doc.gold_labels)
        total += hits / k
    return total / len(gold)


class MlcmMatrix:
    """Confusion matrix over catalog labels plus NTL row and NPL column.

    Rows are true labels (catalog order, then NTL last); columns are
    predicted labels (catalog order, then NPL last).  ``values`` is the
    float view; exact rational cells back the mass-conservation accounting.
    """

    def __init__(self, label_names, exact_cells):
        self.label_names = tuple(label_names)
        n = len(self.label_names)
        if len(exact_cells) != n + 1 or any(len(r) != n + 1 for r in exact_cells):
            raise ValidationError("confusion cells must be (n+1) x (n+1)")
        self._exact = [list(row) for row in exact_cells]
        self.values = np.array(
            [[float(c) for c in row] for row in self._exact], dtype=np.float64
        )
        self.values.setflags(write=False)
        self.row_labels = self.label_names + (NTL,)
        self.col_labels = self.label_names + (NPL,)

    def exact_cell(self, i: int, j: int) -> Fraction:
        return self._exact[i][j]

    def true_label_mass(self) -> Fraction:
        """Exact total mass booked to true-label rows (NTL excluded).

        Equals the number of gold label assignments across all instances:
        every gold label contributes exactly 1 through one of the allocation
        branches.
        """
        return sum((c for row in self._exact[:-1] for c in row), Fraction(0))

    def to_json_dict(self) -> dict:
        return {
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "cells": [[float(c) for c in row] for row in self._exact],
        }

    def to_csv_text(self) -> str:
        def fmt(c: Fraction) -> str:
            f = float(c)
            return str(int(f)) if f == int(f) else repr(f)

        lines = ["true\\pred," + ",".join(self.col_labels)]
        for name, row in zip(self.row_labels, self._exact):
            lines.append(name + "," + ",".join(fmt(c) for c in row))
        return "\n".join(lines) + "\n"

    def save_csv(self, path):
        atomic_write_text(path, self.to_csv_text())


def mlcm(preds: PredictionSet, gold: Dataset, catalog: LabelCatalog | None = None) -> MlcmMatrix:
    """Build the multi-label confusion matrix for a prediction run.

    Raises:
        ValidationError: prediction/gold id mismatch.
    """
    catalog = catalog or gold.catalog
    _check_alignment(preds.ids, gold.ids)
    names = catalog.names
    n = len(names)
    index = catalog.index
    ntl, npl = n, n  # sentinel row / column positions
    cells = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]

    for doc in gold:
        true = doc.gold_labels
        pred = preds[doc.id].predicted
        if not true:
            if not pred:
                cells[ntl][npl] += 1
            else:
                for p in pred:
                    cells[ntl][index(p)] += 1
            continue

        spurious = sorted(pred - true, key=index)
        for t in true & pred:
            cells[index(t)][index(t)] += 1
        missed = true - pred
        if missed:
            for t in missed:
                if spurious:
                    share = Fraction(1, len(spurious))
                    for p in spurious:
                        cells[index(t)][index(p)] += share
                else:
                    cells[index(t)][npl] += 1
        else:
            for p in spurious:
                cells[ntl][index(p)] += 1

    return MlcmMatrix(names, cells)
