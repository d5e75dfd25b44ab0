"""
Label representations: names, adjusted names, keyword centroids
===============================================================
"""

import numpy as np

from simthresh import (
    EmbeddingMatrix,
    LabelCatalog,
    LabelRepresentationConfig,
    LabelSpec,
    build_label_embeddings,
    resolve_surface_forms,
)

catalog = LabelCatalog([
    LabelSpec(name="cs.AI", adjusted_name="artificial intelligence",
              keywords=("reasoning", "agents", "planning")),
    LabelSpec(name="cs.CL", adjusted_name="computational linguistics",
              keywords=("language", "parsing", "text")),
])

# every surface string that would need an embedding, per mode
for mode in ("name", "adjusted", "keywords"):
    forms = resolve_surface_forms(catalog, mode)
    print(f"{mode:9s} -> {forms['cs.AI']}")

# toy 4-dimensional embeddings for each surface form
rng = np.random.default_rng(7)
surfaces = {}
for label in catalog:
    surfaces[label.name] = rng.standard_normal(4)
    surfaces[label.adjusted_name] = rng.standard_normal(4)
    for kw in label.keywords:
        surfaces[kw] = rng.standard_normal(4)
surface_emb = EmbeddingMatrix(list(surfaces), np.array(list(surfaces.values())))

# name mode copies the label-name vector verbatim
name_emb = build_label_embeddings(
    surface_emb, catalog, LabelRepresentationConfig(mode="name"))
print("\nname mode == raw vector:",
      bool(np.array_equal(name_emb.vector("cs.AI"), surfaces["cs.AI"])))

# keyword mode averages the adjusted name with every keyword
kw_emb = build_label_embeddings(
    surface_emb, catalog, LabelRepresentationConfig(mode="keywords"))
manual = np.mean(
    [surfaces["artificial intelligence"]]
    + [surfaces[k] for k in ("reasoning", "agents", "planning")],
    axis=0,
)
print("keyword centroid == manual mean:",
      bool(np.allclose(kw_emb.vector("cs.AI"), manual)))

# the label name can be excluded from the centroid
no_name = build_label_embeddings(
    surface_emb, catalog,
    LabelRepresentationConfig(mode="keywords", include_label_name_in_centroid=False))
print("centroid shifts without the name:",
      bool(not np.array_equal(no_name.vector("cs.AI"), kw_emb.vector("cs.AI"))))
