"""
How many validation labels does calibration need?
=================================================

Label-specific thresholds are fit on validation data, so their quality
depends on how much of it there is.  This script subsamples the validation
set at increasing sizes, recalibrates at each size with fresh seeds, and
tracks test macro-F1 as the sample grows.  A uniform threshold fit on the
FULL validation set serves as the reference line.
"""

from simthresh import (
    curve_csv_text,
    iterative_stratified_split,
    learning_curve,
    make_corpus,
    similarity_matrix,
)

# uneven contamination so the labels degrade at different rates
rates = [0.0, 0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4]
dataset, texts, labels = make_corpus(n_docs=700, n_labels=8, seed=5, noise=0.08,
                                     overlap=rates)
val, test = iterative_stratified_split(dataset, [0.5, 0.5], seed=5)
sims = similarity_matrix(texts, labels, "cosine")
sims_val = sims.select_texts(val.ids)
sims_test = sims.select_texts(test.ids)

result = learning_curve(
    sims_val, val, sims_test, test,
    sizes=[10, 25, 50, 100, 250, len(val)],
    repeats=3,
    base_seed=5,
)

ref = result.reference
print(f"uniform threshold from all {len(val)} validation docs: "
      f"theta={ref['theta']:.2f}, test maF1={ref['macro_f1']:.4f}\n")

by_size = {}
for point in result.points:
    if point.ok:
        by_size.setdefault(point.size, []).append(point.macro_f1)
full = sum(by_size[len(val)]) / len(by_size[len(val)])

# most of the final quality is already there at a few dozen documents
print(f"{'size':>5s} {'mean maF1':>10s} {'of full':>8s}")
for size in sorted(by_size):
    mean = sum(by_size[size]) / len(by_size[size])
    print(f"{size:5d} {mean:10.4f} {100 * mean / full:7.1f}%")

print("\nraw CSV:")
print(curve_csv_text(result))
