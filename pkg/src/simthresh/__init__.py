"""Multi-label text classification by thresholded embedding similarity.

Texts and labels live in one embedding space; a label is assigned when the
similarity between a text and the label representation passes a per-label
decision threshold calibrated on validation data.  The package covers the
full pipeline: label representation building, similarity computation,
threshold calibration, prediction, evaluation (including a multi-label
confusion matrix), distribution statistics, stratified splitting, and a
learning-curve harness, plus a command-line front end (``simthresh``).
"""

from .calibration import (
    calibrate,
    calibrate_fixed,
    calibrate_label_specific,
    calibrate_uniform,
    f1_curve,
    predict,
)
from .data import (
    Dataset,
    Document,
    EmbeddingMatrix,
    LabelCatalog,
    LabelSpec,
    Prediction,
    PredictionSet,
    SimilarityMatrix,
    ThresholdGrid,
    ThresholdProfile,
    ValidationError,
    align,
    load_catalog,
    load_dataset,
    load_embeddings,
    load_predictions,
    load_profile,
    save_catalog,
    save_dataset,
    save_embeddings,
    save_predictions,
    save_profile,
)
from .labelreps import (
    LabelRepresentationConfig,
    build_label_embeddings,
    resolve_surface_forms,
)
from .metrics import EvalReport, MlcmMatrix, evaluate, f1_from_counts, mlcm, precision_at_k
from .sampling import (
    CurvePoint,
    LearningCurveResult,
    curve_csv_text,
    iterative_stratified_split,
    learning_curve,
    subsample_stratified,
)
from .similarity import (
    cosine,
    euclidean,
    load_similarity,
    minmax_normalize,
    save_similarity_binary,
    save_similarity_jsonl,
    similarity_matrix,
)
from .stats import (
    DistributionPair,
    Scope,
    TestResult,
    bonferroni,
    h_test_suite,
    label_alpha_samples,
    overlap,
    pearson,
    split_alpha_beta,
    summarize,
    welch_t_test,
)
from .synthetic import make_corpus

__version__ = "0.1.0"

__all__ = [
    "Dataset", "Document", "EmbeddingMatrix", "LabelCatalog", "LabelSpec",
    "Prediction", "PredictionSet", "SimilarityMatrix", "ThresholdGrid",
    "ThresholdProfile", "ValidationError", "align",
    "load_catalog", "load_dataset", "load_embeddings", "load_predictions",
    "load_profile", "save_catalog", "save_dataset", "save_embeddings",
    "save_predictions", "save_profile",
    "cosine", "euclidean", "similarity_matrix", "minmax_normalize",
    "load_similarity", "save_similarity_binary", "save_similarity_jsonl",
    "LabelRepresentationConfig", "resolve_surface_forms", "build_label_embeddings",
    "calibrate", "calibrate_fixed", "calibrate_uniform",
    "calibrate_label_specific", "f1_curve", "predict",
    "EvalReport", "MlcmMatrix", "evaluate", "f1_from_counts", "mlcm",
    "precision_at_k",
    "DistributionPair", "Scope", "TestResult", "bonferroni", "h_test_suite",
    "label_alpha_samples", "overlap", "pearson", "split_alpha_beta",
    "summarize", "welch_t_test",
    "CurvePoint", "LearningCurveResult", "curve_csv_text",
    "iterative_stratified_split", "learning_curve", "subsample_stratified",
    "make_corpus",
    "__version__",
]
