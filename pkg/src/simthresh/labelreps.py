"""Build label embeddings from a catalog under three representation modes.

* ``name``: embed the label name as written.
* ``adjusted``: embed the hand-adjusted name when one exists, falling back to
  the original name otherwise.
* ``keywords``: embed the name (adjusted when available) plus every keyword,
  then average the vectors into a centroid.

Surface strings are embedded elsewhere; this module resolves which strings
each label needs and averages the resulting vectors.  Centroids are built on
the raw vectors and never re-normalized, so one artifact stays valid for both
cosine (scale-invariant anyway) and Euclidean scoring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import EmbeddingMatrix, EmbeddingMeta, LabelCatalog, ValidationError

MODES = ("name", "adjusted", "keywords")


@dataclass(frozen=True)
class LabelRepresentationConfig:
    """Representation mode plus the centroid composition switch.

    ``include_label_name_in_centroid`` only matters in keywords mode: when
    false, the centroid averages the keyword vectors alone.
    """

    mode: str = "name"
    include_label_name_in_centroid: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown representation mode: {self.mode!r}")


def _primary_surface(entry, mode: str) -> str:
    if mode == "name":
        return entry.name
    # adjusted and keywords modes both prefer the adjusted name when present
    return entry.adjusted_name if entry.adjusted_name else entry.name


def resolve_surface_forms(catalog: LabelCatalog, mode: str) -> dict[str, list[str]]:
    """Map each label to the surface strings that must be embedded for it.

    Raises:
        ValidationError: unknown mode; adjusted mode on a catalog where no
            label has an adjusted name; keywords mode with an empty keyword
            list for some label (message names it).
    """
    if mode not in MODES:
        raise ValidationError(f"unknown representation mode: {mode!r}")
    if mode == "adjusted" and not any(e.adjusted_name for e in catalog):
        raise ValidationError(
            "adjusted mode requires an adjusted_name on at least one label"
        )
    surfaces = {}
    for entry in catalog:
        primary = _primary_surface(entry, mode)
        if mode == "keywords":
            if not entry.keywords:
                raise ValidationError(
                    f"keywords mode: label {entry.name!r} has no keywords"
                )
            surfaces[entry.name] = [primary, *entry.keywords]
        else:
            surfaces[entry.name] = [primary]
    return surfaces


def build_label_embeddings(
    surface_embeddings: EmbeddingMatrix,
    catalog: LabelCatalog,
    config: LabelRepresentationConfig | None = None,
) -> EmbeddingMatrix:
    """One embedding row per label, in catalog order.

    ``surface_embeddings`` must be keyed by surface string (its id field is
    the string itself).  In name/adjusted mode each row is the single surface
    vector verbatim; in keywords mode it is the unweighted mean of the name
    vector (unless switched off) and all keyword vectors.

    Raises:
        ValidationError: any resolved surface string lacking an embedding;
            the message lists every missing string.
    """
    config = config or LabelRepresentationConfig()
    surfaces = resolve_surface_forms(catalog, config.mode)

    missing = sorted({
        s for forms in surfaces.values() for s in forms if s not in surface_embeddings
    })
    if missing:
        raise ValidationError(f"missing surface-string embeddings: {missing}")

    rows = []
    for entry in catalog:
        forms = surfaces[entry.name]
        if config.mode != "keywords":
            rows.append(surface_embeddings.vector(forms[0]).copy())
            continue
        if not config.include_label_name_in_centroid:
            forms = forms[1:]
        stack = np.stack([surface_embeddings.vector(s) for s in forms])
        rows.append(stack.mean(axis=0))

    matrix = np.stack(rows) if rows else np.zeros((0, surface_embeddings.dim))
    meta = EmbeddingMeta(
        encoder_id=surface_embeddings.meta.encoder_id,
        normalization="none",
    )
    return EmbeddingMatrix(catalog.names, matrix, meta)
