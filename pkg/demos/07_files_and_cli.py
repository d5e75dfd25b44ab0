"""File formats and the command-line pipeline.

Everything the library computes can round-trip through files: embeddings
and datasets as JSONL, similarity matrices as a compact binary cache (or
JSONL), profiles and reports as JSON.  The CLI chains the same stages; this
script drives it in-process inside a temp directory.
"""

import json
import tempfile
from pathlib import Path

from simthresh import (
    cli,
    iterative_stratified_split,
    load_similarity,
    make_corpus,
    save_dataset,
    save_embeddings,
    save_similarity_binary,
    similarity_matrix,
)

tmp = Path(tempfile.mkdtemp(prefix="simthresh-demo-"))
print("working in", tmp)

dataset, texts, labels = make_corpus(n_docs=200, n_labels=5, seed=13, noise=0.05)
val, test = iterative_stratified_split(dataset, [0.5, 0.5], seed=13)

# write the inputs the way an embedding exporter would
save_embeddings(texts, tmp / "texts.jsonl")
save_embeddings(texts.select(val.ids), tmp / "val_texts.jsonl")
save_embeddings(labels, tmp / "labels.jsonl")
save_dataset(val, tmp / "val.jsonl")
save_dataset(test, tmp / "test.jsonl")

# binary similarity cache: magic header + float64 block + JSON sidecar
sims = similarity_matrix(texts, labels, "cosine")
save_similarity_binary(sims, tmp / "all.sim")
reloaded = load_similarity(tmp / "all.sim")
print("cache round-trip exact:", bool((reloaded.values == sims.values).all()))
print("sidecar:", (tmp / "all.sim.meta.json").name,
      json.loads((tmp / "all.sim.meta.json").read_text())["label_names"])

# the same pipeline through the CLI, stage by stage
def run(*argv):
    rc = cli.main(list(argv))
    assert rc == 0, f"exit {rc} from {argv[0]}"

run("similarity", "--texts", str(tmp / "val_texts.jsonl"),
    "--labels", str(tmp / "labels.jsonl"), "--out", str(tmp / "val.sim"))
run("calibrate", "--sims", str(tmp / "val.sim"), "--dataset", str(tmp / "val.jsonl"),
    "--method", "label", "--out", str(tmp / "profile.json"))
run("predict", "--sims", str(tmp / "val.sim"), "--profile", str(tmp / "profile.json"),
    "--out", str(tmp / "preds.jsonl"))
run("evaluate", "--preds", str(tmp / "preds.jsonl"), "--dataset", str(tmp / "val.jsonl"),
    "--sims", str(tmp / "val.sim"), "--out", str(tmp / "report.json"))

# every stage wrote an effective-config sidecar for provenance
print("\nconfig sidecars:")
for p in sorted(tmp.glob("*.config.json")):
    print(" ", p.name, "->", json.loads(p.read_text())["command"])

report = json.loads((tmp / "report.json").read_text())
print(f"\nreport.json: maF1={report['macro_f1']:.4f} miF1={report['micro_f1']:.4f}")
