"""Pairwise text-to-label similarity computation and min-max normalization.

Scores are laid out as an m-by-n matrix: one row per text, one column per
label, in catalog order.  Two metrics are supported: cosine similarity
(higher is closer) and Euclidean distance (lower is closer).  Downstream
thresholding respects the direction, so this module only produces values.
"""

from __future__ import annotations

import json
import os
import struct
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .data import (
    EmbeddingMatrix,
    SimilarityMatrix,
    ValidationError,
    atomic_write_bytes,
    atomic_write_text,
)


def cosine(u, v) -> float:
    """Cosine similarity of two vectors, clamped to [-1, 1].

    Raises ValidationError on length mismatch or a zero-norm input.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValidationError(f"vector shapes differ: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValidationError("cosine undefined for zero-norm vector")
    value = float(np.dot(u, v)) / (nu * nv)
    return min(1.0, max(-1.0, value))


def euclidean(u, v) -> float:
    """Euclidean distance of two vectors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValidationError(f"vector shapes differ: {u.shape} vs {v.shape}")
    return float(np.linalg.norm(u - v))


def _cosine_block(texts, labels_t, label_norms):
    # texts: (b, h) raw rows; labels_t: (h, n) raw transpose.
    text_norms = np.linalg.norm(texts, axis=1, keepdims=True)
    raw = texts @ labels_t
    out = raw / (text_norms * label_norms)
    np.clip(out, -1.0, 1.0, out=out)
    return out


def _euclidean_block(texts, labels):
    # (b, 1, h) - (1, n, h) pairwise differences; exact norm, no a^2+b^2-2ab trick
    # so tiny distances do not lose precision to cancellation.
    diff = texts[:, None, :] - labels[None, :, :]
    return np.linalg.norm(diff, axis=2)


def similarity_matrix(
    texts: EmbeddingMatrix,
    labels: EmbeddingMatrix,
    metric: str = "cosine",
    threads: int = 1,
) -> SimilarityMatrix:
    """All pairwise scores between text rows and label rows.

    The row partition used for threading never changes the per-cell
    arithmetic, so results are identical for any thread count.

    Raises:
        ValidationError: dimension mismatch, unknown metric, or (under
            cosine) a zero-norm row, reported with the offending ids.
    """
    if metric not in ("cosine", "euclidean"):
        raise ValidationError(f"unknown metric: {metric!r}")
    if texts.dim != labels.dim and len(texts) and len(labels):
        raise ValidationError(
            f"embedding dimensions differ: texts {texts.dim}, labels {labels.dim}"
        )
    tm = texts.matrix
    lm = labels.matrix
    if metric == "cosine":
        for name, mat, ids in (("text", tm, texts.ids), ("label", lm, labels.ids)):
            norms = np.linalg.norm(mat, axis=1)
            if (norms == 0.0).any():
                bad = [ids[i] for i in np.nonzero(norms == 0.0)[0]]
                raise ValidationError(f"zero-norm {name} rows under cosine: {bad}")

    m = len(texts)
    if m == 0 or len(labels) == 0:
        values = np.zeros((m, len(labels)))
    else:
        if metric == "cosine":
            labels_t = np.ascontiguousarray(lm.T)
            label_norms = np.linalg.norm(lm, axis=1)[None, :]
            compute = lambda block: _cosine_block(block, labels_t, label_norms)
        else:
            compute = lambda block: _euclidean_block(block, lm)

        workers = max(1, int(threads))
        if workers == 1 or m < 2 * workers:
            values = compute(tm)
        else:
            bounds = np.linspace(0, m, workers + 1).astype(int)
            values = np.empty((m, len(labels)))
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [
                    pool.submit(compute, tm[lo:hi])
                    for lo, hi in zip(bounds[:-1], bounds[1:])
                ]
                for (lo, hi), fut in zip(zip(bounds[:-1], bounds[1:]), futures):
                    values[lo:hi] = fut.result()

    return SimilarityMatrix(metric, values, texts.ids, labels.ids)


def minmax_normalize(sims: SimilarityMatrix) -> SimilarityMatrix:
    """Rescale all entries to [0, 1] using the global min and max.

    A constant matrix maps to all zeros rather than erroring: such a matrix
    carries no ranking information and calibration will surface that.
    Non-constant inputs normalize idempotently (a second pass is an identity
    up to rounding) and order is preserved.
    """
    values = sims.values
    if values.size == 0:
        return SimilarityMatrix(
            sims.metric, values.copy(), sims.text_ids, sims.label_names, normalized=True
        )
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        out = np.zeros_like(values)
    else:
        out = (values - lo) / (hi - lo)
    return SimilarityMatrix(
        sims.metric, out, sims.text_ids, sims.label_names, normalized=True
    )


# ---------------------------------------------------------------------------
# persistence: binary cache with JSONL fallback
# ---------------------------------------------------------------------------

_MAGIC = b"SIM1"
_METRIC_CODES = {"cosine": 0, "euclidean": 1}
_CODE_METRICS = {v: k for k, v in _METRIC_CODES.items()}


def sidecar_path(path) -> str:
    return os.fspath(path) + ".meta.json"


def save_similarity_binary(sims: SimilarityMatrix, path):
    """Write the fixed-layout binary cache plus its id sidecar.

    Layout: magic "SIM1", little-endian u32 m, u32 n, u8 metric code
    (0 cosine, 1 euclidean), u8 normalized flag, then m*n float64 row-major.
    """
    m, n = sims.shape
    header = _MAGIC + struct.pack(
        "<IIBB", m, n, _METRIC_CODES[sims.metric], int(sims.normalized)
    )
    payload = np.ascontiguousarray(sims.values, dtype="<f8").tobytes()
    atomic_write_bytes(path, header + payload)
    sidecar = {
        "text_ids": list(sims.text_ids),
        "label_names": list(sims.label_names),
    }
    atomic_write_text(sidecar_path(path), json.dumps(sidecar) + "\n")


def load_similarity_binary(path) -> SimilarityMatrix:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _MAGIC:
        raise ValidationError(f"{path}: not a similarity cache (bad magic)")
    if len(blob) < 14:
        raise ValidationError(f"{path}: truncated header")
    m, n, code, normed = struct.unpack("<IIBB", blob[4:14])
    if code not in _CODE_METRICS:
        raise ValidationError(f"{path}: unknown metric code {code}")
    expected = 14 + 8 * m * n
    if len(blob) != expected:
        raise ValidationError(
            f"{path}: payload is {len(blob)} bytes, expected {expected} for {m}x{n}"
        )
    values = np.frombuffer(blob[14:], dtype="<f8").reshape(m, n).astype(np.float64)
    try:
        with open(sidecar_path(path), "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
        text_ids = sidecar["text_ids"]
        label_names = sidecar["label_names"]
    except FileNotFoundError:
        raise ValidationError(f"{path}: missing sidecar {sidecar_path(path)}") from None
    except (json.JSONDecodeError, KeyError) as exc:
        raise ValidationError(f"{sidecar_path(path)}: malformed sidecar: {exc}") from None
    if len(text_ids) != m or len(label_names) != n:
        raise ValidationError(
            f"{path}: sidecar lists {len(text_ids)} texts / {len(label_names)} labels, "
            f"cache holds {m}x{n}"
        )
    return SimilarityMatrix(_CODE_METRICS[code], values, text_ids, label_names, bool(normed))


def save_similarity_jsonl(sims: SimilarityMatrix, path):
    """Portable fallback: a header line, then one row object per text."""
    lines = [json.dumps({
        "metric": sims.metric,
        "normalized": sims.normalized,
        "label_names": list(sims.label_names),
    })]
    for text_id, row in zip(sims.text_ids, sims.values):
        lines.append(json.dumps({"id": text_id, "values": [float(x) for x in row]}))
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_similarity_jsonl(path) -> SimilarityMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = [ln.strip() for ln in fh if ln.strip()]
    if not raw_lines:
        raise ValidationError(f"{path}: empty similarity file")
    try:
        header = json.loads(raw_lines[0])
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}:1: malformed header: {exc}") from None
    if not isinstance(header, dict) or "metric" not in header or "label_names" not in header:
        raise ValidationError(f"{path}:1: header must carry metric and label_names")
    label_names = header["label_names"]
    text_ids = []
    rows = []
    for lineno, line in enumerate(raw_lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}:{lineno}: malformed JSON: {exc}") from None
        if "id" not in obj or "values" not in obj:
            raise ValidationError(f"{path}:{lineno}: expected id/values keys")
        if len(obj["values"]) != len(label_names):
            raise ValidationError(
                f"{path}:{lineno}: row has {len(obj['values'])} values, "
                f"header names {len(label_names)} labels"
            )
        text_ids.append(obj["id"])
        rows.append(obj["values"])
    values = np.asarray(rows, dtype=np.float64) if rows else np.zeros((0, len(label_names)))
    return SimilarityMatrix(
        header["metric"], values, text_ids, label_names,
        bool(header.get("normalized", False)),
    )


def load_similarity(path) -> SimilarityMatrix:
    """Load either storage format, sniffing the binary magic."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == _MAGIC:
        return load_similarity_binary(path)
    return load_similarity_jsonl(path)
