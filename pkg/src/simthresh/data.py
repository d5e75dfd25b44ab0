"""Domain types and file ingestion for the similarity-thresholding toolkit.

All interchange files are line-oriented JSON (one object per line) for
datasets, embeddings and predictions, and plain JSON for label catalogs,
threshold profiles and reports:

* dataset JSONL:      ``{"id": str, "text": str, "labels": [str, ...]}``
* embeddings JSONL:   ``{"id": str, "vector": [float, ...]}``
* label catalog JSON: ``[{"label": str, "adjusted_name": str|null,
                          "keywords": [str, ...]}, ...]``
* threshold profile JSON: ``{"method", "metric", "grid": {"lo","hi","step"},
                             "thresholds": {label: float}, "fallback": float}``
* predictions JSONL:  ``{"id": str, "predicted": [str], "scores": {label: float}}``

Floats are serialized with their shortest round-trip representation, so a
save/load cycle reproduces values exactly.  All structures are immutable
after construction and safe to share between threads.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field


class ValidationError(ValueError):
    """Raised when an input file or in-memory structure violates a contract."""


# ---------------------------------------------------------------------------
# documents and label catalogs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Document:
    """One classification instance: an id, its text and its gold label set.

    The text may be empty when embeddings are computed elsewhere and only
    supplied as vectors; the toolkit itself never embeds text.
    """

    id: str
    text: str
    gold_labels: frozenset[str] = frozenset()


@dataclass(frozen=True)
class LabelSpec:
    """One catalog entry: the label name plus optional richer surfaces."""

    name: str
    adjusted_name: str | None = None
    keywords: tuple[str, ...] = ()


class LabelCatalog:
    """Ordered list of labels.

    The declaration order is the canonical label order everywhere: similarity
    matrix columns, report rows and confusion-matrix axes all follow it.
    """

    def __init__(self, entries):
        entries = tuple(entries)
        names = [e.name for e in entries]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValidationError(f"duplicate label names in catalog: {dupes}")
        self.entries = entries
        self.names = tuple(names)
        self._index = {n: i for i, n in enumerate(names)}

    @classmethod
    def from_names(cls, names) -> "LabelCatalog":
        return cls(LabelSpec(name=n) for n in names)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, name):
        return name in self._index

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        return isinstance(other, LabelCatalog) and self.entries == other.entries

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"unknown label: {name!r}") from None

    def get(self, name: str) -> LabelSpec:
        return self.entries[self.index(name)]


class Dataset:
    """A collection of documents plus the label catalog they are drawn from."""

    def __init__(self, documents, catalog: LabelCatalog):
        documents = tuple(documents)
        seen = set()
        for doc in documents:
            if doc.id in seen:
                raise ValidationError(f"duplicate document id: {doc.id!r}")
            seen.add(doc.id)
            unknown = doc.gold_labels - set(catalog.names)
            if unknown:
                raise ValidationError(
                    f"document {doc.id!r} carries labels not in the catalog: "
                    f"{sorted(unknown)}"
                )
        self.documents = documents
        self.catalog = catalog
        self._by_id = {d.id: d for d in documents}

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __eq__(self, other):
        return (
            isinstance(other, Dataset)
            and self.documents == other.documents
            and self.catalog == other.catalog
        )

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.documents)

    def __getitem__(self, doc_id: str) -> Document:
        try:
            return self._by_id[doc_id]
        except KeyError:
            raise ValidationError(f"unknown document id: {doc_id!r}") from None

    def subset(self, ids) -> "Dataset":
        """Documents with the given ids, in this dataset's order."""
        wanted = set(ids)
        missing = wanted - set(self._by_id)
        if missing:
            raise ValidationError(f"unknown document ids: {sorted(missing)}")
        return Dataset((d for d in self.documents if d.id in wanted), self.catalog)

    def gold_sets(self) -> tuple[frozenset[str], ...]:
        return tuple(d.gold_labels for d in self.documents)


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingMeta:
    encoder_id: str = ""
    normalization: str = "none"  # "none" | "unit"


class EmbeddingMatrix:
    """Id-indexed dense float vectors with a common dimension.

    ``matrix`` is an (m, dim) float64 array whose row order matches ``ids``.
    """

    def __init__(self, ids, matrix, meta: EmbeddingMeta | None = None):
        import numpy as np

        ids = tuple(ids)
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValidationError(f"embedding matrix must be 2-D, got {matrix.ndim}-D")
        if len(ids) != matrix.shape[0]:
            raise ValidationError(
                f"{len(ids)} ids but {matrix.shape[0]} embedding rows"
            )
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate ids in embedding matrix")
        if matrix.size and not np.isfinite(matrix).all():
            bad = [ids[i] for i in np.unique(np.nonzero(~np.isfinite(matrix))[0])]
            raise ValidationError(f"non-finite embedding components for ids: {bad}")
        matrix.setflags(write=False)
        self.ids = ids
        self.matrix = matrix
        self.meta = meta or EmbeddingMeta()
        self._index = {v: i for i, v in enumerate(ids)}

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.ids)

    def __contains__(self, key):
        return key in self._index

    def vector(self, key: str):
        try:
            return self.matrix[self._index[key]]
        except KeyError:
            raise ValidationError(f"no embedding for id: {key!r}") from None

    def select(self, ids) -> "EmbeddingMatrix":
        """Rows for the given ids, in the given order."""
        missing = [i for i in ids if i not in self._index]
        if missing:
            raise ValidationError(f"missing embeddings for ids: {missing}")
        rows = [self._index[i] for i in ids]
        return EmbeddingMatrix(ids, self.matrix[rows].copy(), self.meta)


@dataclass(frozen=True)
class AlignedView:
    """Dataset documents paired with their embedding vectors, dataset order."""

    ids: tuple[str, ...]
    gold: tuple[frozenset[str], ...]
    vectors: object  # (m, dim) float64 array
    catalog: LabelCatalog


def align(dataset: Dataset, embeddings: EmbeddingMatrix) -> AlignedView:
    """Pair every dataset document with its embedding row.

    The view follows the dataset's document order; extra embedding rows are
    ignored.  Raises :class:`ValidationError` listing every dataset id that
    has no embedding.
    """
    missing = [d.id for d in dataset if d.id not in embeddings]
    if missing:
        raise ValidationError(f"missing embeddings for ids: {missing}")
    selected = embeddings.select(dataset.ids)
    return AlignedView(
        ids=dataset.ids,
        gold=dataset.gold_sets(),
        vectors=selected.matrix,
        catalog=dataset.catalog,
    )


# ---------------------------------------------------------------------------
# similarity matrices
# ---------------------------------------------------------------------------

METRICS = ("cosine", "euclidean")


class SimilarityMatrix:
    """An m-by-n matrix of text-to-label scores under one metric."""

    def __init__(self, metric, values, text_ids, label_names, normalized=False):
        import numpy as np

        if metric not in METRICS:
            raise ValidationError(f"unknown metric: {metric!r}")
        values = np.asarray(values, dtype=np.float64)
        text_ids = tuple(text_ids)
        label_names = tuple(label_names)
        if values.ndim != 2:
            raise ValidationError("similarity values must be 2-D")
        if values.shape != (len(text_ids), len(label_names)):
            raise ValidationError(
                f"value shape {values.shape} inconsistent with "
                f"{len(text_ids)} texts x {len(label_names)} labels"
            )
        if values.size and not np.isfinite(values).all():
            raise ValidationError("similarity values must be finite")
        values.setflags(write=False)
        self.metric = metric
        self.values = values
        self.text_ids = text_ids
        self.label_names = label_names
        self.normalized = bool(normalized)
        self._row_index = {t: i for i, t in enumerate(text_ids)}

    @property
    def shape(self):
        return self.values.shape

    def row(self, text_id: str):
        try:
            return self.values[self._row_index[text_id]]
        except KeyError:
            raise ValidationError(f"unknown text id: {text_id!r}") from None

    def select_texts(self, ids) -> "SimilarityMatrix":
        missing = [i for i in ids if i not in self._row_index]
        if missing:
            raise ValidationError(f"unknown text ids: {missing}")
        rows = [self._row_index[i] for i in ids]
        return SimilarityMatrix(
            self.metric, self.values[rows].copy(), ids, self.label_names,
            self.normalized,
        )


# ---------------------------------------------------------------------------
# threshold grids and profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdGrid:
    """Candidate thresholds: lo, lo+step, ... with the final point exactly hi.

    Points are rounded to 12 decimals so that e.g. the 21st point of the
    default grid is the float 0.21 rather than 0.21000000000000002.
    """

    lo: float = 0.0
    hi: float = 1.0
    step: float = 0.01

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValidationError(f"grid lo must be < hi, got [{self.lo}, {self.hi}]")
        if not (self.step > 0):
            raise ValidationError(f"grid step must be positive, got {self.step}")

    def points(self):
        import numpy as np

        count = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        pts = np.round(self.lo + self.step * np.arange(count), 12)
        if pts[-1] < self.hi:
            pts = np.append(pts, self.hi)
        pts[-1] = self.hi
        pts.setflags(write=False)
        return pts

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


THRESHOLD_METHODS = ("fixed05", "norm05", "uniform", "label_specific")


@dataclass(frozen=True)
class ThresholdProfile:
    """Per-label decision thresholds plus the calibration metadata.

    Labels absent from ``per_label`` fall back to ``fallback`` (the mean of
    all calibrated thresholds for the label-specific method).  For the
    ``norm05`` method, ``norm_stats`` freezes the validation min/max used to
    rescale scores before the 0.5 comparison at prediction time.
    """

    method: str
    metric: str
    per_label: dict[str, float]
    fallback: float
    grid: ThresholdGrid
    calibration_objective: str = "positiveF1"
    tie_break: str = "low"
    norm_stats: tuple[float, float] | None = None

    def __post_init__(self):
        if self.method not in THRESHOLD_METHODS:
            raise ValidationError(f"unknown threshold method: {self.method!r}")
        if self.metric not in METRICS:
            raise ValidationError(f"unknown metric: {self.metric!r}")
        for name, value in self.per_label.items():
            if not self.grid.contains(value):
                raise ValidationError(
                    f"threshold {value} for label {name!r} outside grid "
                    f"[{self.grid.lo}, {self.grid.hi}]"
                )

    def threshold_for(self, label: str) -> float:
        return self.per_label.get(label, self.fallback)


# ---------------------------------------------------------------------------
# predictions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Prediction:
    id: str
    predicted: frozenset[str]
    scores: dict[str, float] = field(default_factory=dict)


class PredictionSet:
    """Predicted label sets (possibly empty) and raw scores per document."""

    def __init__(self, predictions):
        predictions = tuple(predictions)
        seen = set()
        for p in predictions:
            if p.id in seen:
                raise ValidationError(f"duplicate prediction id: {p.id!r}")
            seen.add(p.id)
        self.predictions = predictions
        self._by_id = {p.id: p for p in predictions}

    def __len__(self):
        return len(self.predictions)

    def __iter__(self):
        return iter(self.predictions)

    @property
    def ids(self):
        return tuple(p.id for p in self.predictions)

    def __getitem__(self, doc_id) -> Prediction:
        try:
            return self._by_id[doc_id]
        except KeyError:
            raise ValidationError(f"no prediction for id: {doc_id!r}") from None


# ---------------------------------------------------------------------------
# file I/O
# ---------------------------------------------------------------------------

def atomic_write_text(path, text: str):
    """Write via a temp file in the same directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path, blob: bytes):
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _iter_jsonl(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: malformed JSON: {exc}") from None
            yield lineno, obj


def load_dataset(path, catalog: LabelCatalog | None = None) -> Dataset:
    """Load a dataset from JSONL with {"id", "text", "labels"} records.

    When ``catalog`` is given, every label is validated against it; otherwise
    the catalog is inferred as the sorted set of all labels seen.

    Raises:
        ValidationError: malformed line (with line number), duplicate id, or
            a label missing from the supplied catalog.
    """
    docs = []
    seen_ids = {}
    labels_seen = set()
    for lineno, obj in _iter_jsonl(path):
        if not isinstance(obj, dict) or not {"id", "text", "labels"} <= set(obj):
            raise ValidationError(
                f"{path}:{lineno}: expected object with id/text/labels keys"
            )
        doc_id = obj["id"]
        if not isinstance(doc_id, str):
            raise ValidationError(f"{path}:{lineno}: id must be a string")
        if doc_id in seen_ids:
            raise ValidationError(
                f"{path}:{lineno}: duplicate id {doc_id!r} "
                f"(first seen on line {seen_ids[doc_id]})"
            )
        seen_ids[doc_id] = lineno
        text = obj["text"]
        if not isinstance(text, str):
            raise ValidationError(f"{path}:{lineno}: text must be a string")
        labels = obj["labels"]
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise ValidationError(f"{path}:{lineno}: labels must be a list of strings")
        if catalog is not None:
            unknown = [x for x in labels if x not in catalog]
            if unknown:
                raise ValidationError(
                    f"{path}:{lineno}: labels not in catalog: {unknown}"
                )
        labels_seen.update(labels)
        docs.append(Document(id=doc_id, text=text, gold_labels=frozenset(labels)))
    if catalog is None:
        catalog = LabelCatalog.from_names(sorted(labels_seen))
    return Dataset(docs, catalog)


def save_dataset(dataset: Dataset, path):
    lines = []
    for doc in dataset:
        lines.append(json.dumps(
            {"id": doc.id, "text": doc.text,
             "labels": sorted(doc.gold_labels, key=dataset.catalog.index)},
            ensure_ascii=False,
        ))
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def load_embeddings(path, meta: EmbeddingMeta | None = None) -> EmbeddingMatrix:
    """Load embeddings from JSONL with {"id", "vector"} records.

    Raises:
        ValidationError: ragged vector lengths, non-finite components or
            duplicate ids (all reported with line numbers).
    """
    ids: list[str] = []
    vectors = []
    seen = {}
    dim = None
    for lineno, obj in _iter_jsonl(path):
        if not isinstance(obj, dict) or not {"id", "vector"} <= set(obj):
            raise ValidationError(f"{path}:{lineno}: expected object with id/vector keys")
        key = obj["id"]
        if not isinstance(key, str):
            raise ValidationError(f"{path}:{lineno}: id must be a string")
        if key in seen:
            raise ValidationError(
                f"{path}:{lineno}: duplicate id {key!r} (first seen on line {seen[key]})"
            )
        seen[key] = lineno
        vec = obj["vector"]
        if not isinstance(vec, list) or not all(isinstance(x, (int, float)) for x in vec):
            raise ValidationError(f"{path}:{lineno}: vector must be a list of numbers")
        if any(isinstance(x, float) and not math.isfinite(x) for x in vec):
            raise ValidationError(f"{path}:{lineno}: non-finite vector component")
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise ValidationError(
                f"{path}:{lineno}: vector length {len(vec)} does not match "
                f"established dimension {dim}"
            )
        ids.append(key)
        vectors.append(vec)
    import numpy as np

    matrix = np.asarray(vectors, dtype=np.float64) if vectors else np.zeros((0, dim or 0))
    return EmbeddingMatrix(ids, matrix, meta)


def save_embeddings(embeddings: EmbeddingMatrix, path):
    lines = []
    for key, row in zip(embeddings.ids, embeddings.matrix):
        lines.append(json.dumps({"id": key, "vector": [float(x) for x in row]}))
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def load_catalog(path) -> LabelCatalog:
    """Load a label catalog from its JSON list form."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON: {exc}") from None
    if not isinstance(raw, list):
        raise ValidationError(f"{path}: catalog must be a JSON list")
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "label" not in item:
            raise ValidationError(f"{path}: entry {i} must be an object with a 'label'")
        entries.append(LabelSpec(
            name=item["label"],
            adjusted_name=item.get("adjusted_name"),
            keywords=tuple(item.get("keywords") or ()),
        ))
    return LabelCatalog(entries)


def save_catalog(catalog: LabelCatalog, path):
    raw = [
        {"label": e.name, "adjusted_name": e.adjusted_name, "keywords": list(e.keywords)}
        for e in catalog
    ]
    atomic_write_text(path, json.dumps(raw, indent=2, ensure_ascii=False) + "\n")


def load_profile(path) -> ThresholdProfile:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON: {exc}") from None
    try:
        grid = ThresholdGrid(**raw["grid"])
        return ThresholdProfile(
            method=raw["method"],
            metric=raw["metric"],
            per_label=dict(raw["thresholds"]),
            fallback=float(raw["fallback"]),
            grid=grid,
            calibration_objective=raw.get("calibration_objective", "positiveF1"),
            tie_break=raw.get("tie_break", "low"),
            norm_stats=_load_profile_norm(raw),
        )
    except KeyError as exc:
        raise ValidationError(f"{path}: missing profile key {exc}") from None


def save_profile(profile: ThresholdProfile, path):
    raw = {
        "method": profile.method,
        "metric": profile.metric,
        "grid": {"lo": profile.grid.lo, "hi": profile.grid.hi, "step": profile.grid.step},
        "thresholds": {k: float(v) for k, v in profile.per_label.items()},
        "fallback": float(profile.fallback),
        "calibration_objective": profile.calibration_objective,
        "tie_break": profile.tie_break,
    }
    if profile.norm_stats is not None:
        raw["norm_stats"] = {"min": profile.norm_stats[0], "max": profile.norm_stats[1]}
    atomic_write_text(path, json.dumps(raw, indent=2) + "\n")


def _load_profile_norm(raw):
    norm = raw.get("norm_stats")
    if norm is None:
        return None
    return (float(norm["min"]), float(norm["max"]))


def load_predictions(path) -> PredictionSet:
    preds = []
    for lineno, obj in _iter_jsonl(path):
        if not isinstance(obj, dict) or "id" not in obj or "predicted" not in obj:
            raise ValidationError(f"{path}:{lineno}: expected id/predicted keys")
        preds.append(Prediction(
            id=obj["id"],
            predicted=frozenset(obj["predicted"]),
            scores={k: float(v) for k, v in (obj.get("scores") or {}).items()},
        ))
    return PredictionSet(preds)


def save_predictions(preds: PredictionSet, path, catalog: LabelCatalog | None = None):
    order = catalog.index if catalog is not None else None
    lines = []
    for p in preds:
        predicted = sorted(p.predicted, key=order) if order else sorted(p.predicted)
        lines.append(json.dumps({
            "id": p.id,
            "predicted": predicted,
            "scores": {k: float(v) for k, v in p.scores.items()},
        }))
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))
