"""Multi-label confusion matrix with NTL/NPL sentinel axes.

A plain confusion matrix has no cell for "predicted something but nothing
was true" or the reverse, which happens constantly in multi-label data.
The matrix here adds a no-true-label row and a no-predicted-label column,
and splits each missed true label's unit of mass evenly across the spurious
predictions of the same document, so gold mass is conserved exactly.
"""

from fractions import Fraction

from simthresh import (
    Dataset,
    Document,
    LabelCatalog,
    Prediction,
    PredictionSet,
    mlcm,
)

catalog = LabelCatalog.from_names(["news", "sport", "tech"])
docs = [
    Document(id="d1", text="", gold_labels=frozenset({"news"})),
    Document(id="d2", text="", gold_labels=frozenset({"news", "tech"})),
    Document(id="d3", text="", gold_labels=frozenset({"sport"})),
    Document(id="d4", text="", gold_labels=frozenset()),       # nothing true
    Document(id="d5", text="", gold_labels=frozenset({"tech"})),
]
gold = Dataset(docs, catalog)

preds = PredictionSet([
    Prediction(id="d1", predicted=frozenset({"news"}), scores={}),       # exact
    Prediction(id="d2", predicted=frozenset({"news"}), scores={}),       # missed tech
    Prediction(id="d3", predicted=frozenset({"news", "tech"}), scores={}),  # both wrong
    Prediction(id="d4", predicted=frozenset({"sport"}), scores={}),      # spurious
    Prediction(id="d5", predicted=frozenset(), scores={}),               # abstained
])

matrix = mlcm(preds, gold)
print(matrix.to_csv_text())

# d3's one true label (sport) splits 1/2 + 1/2 over its two wrong predictions
i = matrix.row_labels.index("sport")
j = matrix.col_labels.index("news")
print("sport->news cell:", matrix.exact_cell(i, j))
assert matrix.exact_cell(i, j) == Fraction(1, 2)

total_gold = sum(len(d.gold_labels) for d in docs)
print(f"true-label mass {matrix.true_label_mass()} == "
      f"{total_gold} gold assignments")
assert matrix.true_label_mass() == total_gold
