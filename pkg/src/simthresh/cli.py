"""Command-line pipeline: one subcommand per stage.

    build-labels    catalog + surface embeddings -> label embeddings
    similarity      text + label embeddings -> score matrix
    calibrate       score matrix + gold labels -> threshold profile
    predict         score matrix + profile -> predictions
    evaluate        predictions + gold labels -> metric report
    explore         score distributions -> pairwise t-test report
    mlcm            predictions + gold labels -> confusion matrix
    split           dataset -> stratified parts
    learning-curve  validation/test matrices -> calibration size study

Every command accepts --config FILE holding flat ``key = value`` lines whose
keys mirror the long flag names; explicit flags win over the file.  Each run
writes an effective-config JSON next to its output.  Exit codes: 0 success,
2 validation or domain error, 3 I/O error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import calibration, labelreps, metrics, sampling, similarity, stats
from .data import (
    LabelCatalog,
    ThresholdGrid,
    ValidationError,
    atomic_write_text,
    load_catalog,
    load_dataset,
    load_embeddings,
    load_predictions,
    load_profile,
    save_dataset,
    save_embeddings,
    save_predictions,
    save_profile,
)


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 64."""

    def error(self, message):
        self.exit(64, f"{self.prog}: error: {message}\n")


def _common_options(parser):
    parser.add_argument("--config", metavar="FILE",
                        help="flat key=value config file; flags override it")
    parser.add_argument("--seed", type=int, default=42,
                        help="seed for all randomized steps (default 42)")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads where supported")


def load_config_file(path) -> dict:
    """Flat ``key = value`` lines; # starts a comment; values parse as JSON
    scalars when possible, bare strings otherwise."""
    mapping = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if not key:
                raise ValidationError(f"{path}:{lineno}: empty key")
            try:
                mapping[key] = json.loads(value)
            except json.JSONDecodeError:
                mapping[key] = value
    return mapping


def _write_effective_config(args, command: str, anchor_path: str):
    payload = {k: v for k, v in vars(args).items() if k != "func"}
    payload["command"] = command
    atomic_write_text(
        str(anchor_path) + ".config.json",
        json.dumps(payload, indent=2, default=str) + "\n",
    )


def _grid_from_args(args) -> ThresholdGrid | None:
    lo, hi, step = args.grid_lo, args.grid_hi, args.grid_step
    if lo is None and hi is None and step is None:
        return None
    return ThresholdGrid(
        lo if lo is not None else 0.0,
        hi if hi is not None else 1.0,
        step if step is not None else 0.01,
    )


def _dataset_with_catalog(dataset_path, catalog_path=None, label_names=None):
    """Load gold data against an explicit catalog, a label-name list (e.g.
    similarity matrix columns), or inferred from the data itself."""
    if catalog_path:
        return load_dataset(dataset_path, load_catalog(catalog_path))
    if label_names is not None:
        return load_dataset(dataset_path, LabelCatalog.from_names(label_names))
    return load_dataset(dataset_path)


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def cmd_build_labels(args) -> int:
    catalog = load_catalog(args.catalog)
    surfaces = load_embeddings(args.surfaces)
    config = labelreps.LabelRepresentationConfig(
        mode=args.mode,
        include_label_name_in_centroid=not args.exclude_name,
    )
    label_emb = labelreps.build_label_embeddings(surfaces, catalog, config)
    save_embeddings(label_emb, args.out)
    _write_effective_config(args, "build-labels", args.out)
    print(f"wrote {len(label_emb)} label embeddings ({args.mode} mode) to {args.out}")
    return 0


def cmd_similarity(args) -> int:
    texts = load_embeddings(args.texts)
    labels = load_embeddings(args.labels)
    sims = similarity.similarity_matrix(texts, labels, args.metric, threads=args.threads)
    if args.normalize:
        sims = similarity.minmax_normalize(sims)
    if args.format == "binary":
        similarity.save_similarity_binary(sims, args.out)
    else:
        similarity.save_similarity_jsonl(sims, args.out)
    _write_effective_config(args, "similarity", args.out)
    m, n = sims.shape
    tag = " normalized" if sims.normalized else ""
    print(f"wrote {m}x{n} {sims.metric}{tag} matrix to {args.out}")
    return 0


_METHOD_ALIASES = {"label": "label_specific"}


def cmd_calibrate(args) -> int:
    sims = similarity.load_similarity(args.sims)
    gold = _dataset_with_catalog(args.dataset, args.catalog, sims.label_names)
    method = _METHOD_ALIASES.get(args.method, args.method)
    profile = calibration.calibrate(
        method, sims, gold, grid=_grid_from_args(args), tie_break=args.tie_break
    )
    save_profile(profile, args.out)
    _write_effective_config(args, "calibrate", args.out)
    print(
        f"calibrated {method} profile: {len(profile.per_label)} thresholds, "
        f"fallback {profile.fallback:.4f} -> {args.out}"
    )
    return 0


def cmd_predict(args) -> int:
    sims = similarity.load_similarity(args.sims)
    profile = load_profile(args.profile)
    preds = calibration.predict(sims, profile)
    catalog = LabelCatalog.from_names(sims.label_names)
    save_predictions(preds, args.out, catalog)
    _write_effective_config(args, "predict", args.out)
    total = sum(len(p.predicted) for p in preds)
    mean = total / len(preds) if len(preds) else 0.0
    print(f"predicted {len(preds)} documents, {mean:.2f} labels/doc -> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    preds = load_predictions(args.preds)
    sims = similarity.load_similarity(args.sims) if args.sims else None
    label_names = None
    if sims is not None:
        label_names = sims.label_names
    elif len(preds) and all(
        p.scores.keys() == next(iter(preds)).scores.keys() for p in preds
    ):
        label_names = sorted(next(iter(preds)).scores)
    gold = _dataset_with_catalog(args.dataset, args.catalog, label_names)
    report = metrics.evaluate(
        preds, gold, macro_over=args.macro_over, sims=sims, metric=args.metric
    )
    atomic_write_text(args.out, json.dumps(report.to_json_dict(), indent=2) + "\n")
    _write_effective_config(args, "evaluate", args.out)
    print(report.summary_line())
    return 0


def cmd_explore(args) -> int:
    entries = args.sims or []
    if args.level == "labels":
        if len(entries) != 1 or not args.dataset:
            raise ValidationError(
                "labels level needs exactly one --sims and a --dataset"
            )
        sims = similarity.load_similarity(entries[0])
        gold = _dataset_with_catalog(args.dataset, args.catalog, sims.label_names)
        samples = stats.label_alpha_samples(sims, gold)
        report = stats.h_test_suite(samples, equal_var=args.equal_var, level="labels")
        if sims.metric == "cosine":
            overlaps = {}
            for name in sims.label_names:
                pair = stats.split_alpha_beta(sims, gold, stats.Scope(label=name))
                if pair.alpha.size and pair.beta.size:
                    overlaps[name] = stats.overlap(pair.alpha, pair.beta)
            report["alpha_beta_overlap"] = overlaps
    else:
        named = {}
        for entry in entries:
            if "=" not in entry:
                raise ValidationError(
                    f"--sims at {args.level} level must be NAME=PATH, got {entry!r}"
                )
            name, _, path = entry.partition("=")
            named[name] = similarity.load_similarity(path).values.ravel()
        report = stats.h_test_suite(named, equal_var=args.equal_var, level=args.level)

    payload = dict(report)
    payload["pairs"] = [
        {"a": r.a, "b": r.b, "t": r.t, "p": r.p_raw,
         "p_adj": r.p_adj, "significant": r.significant}
        for r in report["pairs"]
    ]
    atomic_write_text(args.out, json.dumps(payload, indent=2) + "\n")
    if args.samples_csv:
        _write_samples_csv(args, entries)
    _write_effective_config(args, "explore", args.out)
    print(
        f"{report['level']}: {report['family_size']} pairs, "
        f"{report['proportion_significant']:.2f} significant -> {args.out}"
    )
    return 0


def _write_samples_csv(args, entries):
    lines = ["name,kind,value"]
    if args.level == "labels":
        sims = similarity.load_similarity(entries[0])
        gold = _dataset_with_catalog(args.dataset, args.catalog, sims.label_names)
        for name in sims.label_names:
            pair = stats.split_alpha_beta(sims, gold, stats.Scope(label=name))
            for v in pair.alpha:
                lines.append(f"{name},alpha,{v!r}")
            for v in pair.beta:
                lines.append(f"{name},beta,{v!r}")
    else:
        for entry in entries:
            name, _, path = entry.partition("=")
            for v in similarity.load_similarity(path).values.ravel():
                lines.append(f"{name},all,{v!r}")
    atomic_write_text(args.samples_csv, "\n".join(lines) + "\n")


def cmd_mlcm(args) -> int:
    preds = load_predictions(args.preds)
    gold = _dataset_with_catalog(args.dataset, args.catalog)
    matrix = metrics.mlcm(preds, gold)
    matrix.save_csv(args.out + ".csv")
    atomic_write_text(args.out + ".json", json.dumps(matrix.to_json_dict(), indent=2) + "\n")
    _write_effective_config(args, "mlcm", args.out)
    print(
        f"confusion matrix over {len(matrix.label_names)} labels, "
        f"true-label mass {float(matrix.true_label_mass())} -> {args.out}.csv/.json"
    )
    return 0


def cmd_split(args) -> int:
    gold = _dataset_with_catalog(args.dataset, args.catalog)
    fractions = [float(f) for f in args.fractions.split(",") if f.strip()]
    parts = sampling.iterative_stratified_split(gold, fractions, seed=args.seed)
    paths = []
    for i, part in enumerate(parts):
        path = f"{args.out}.part{i}.jsonl"
        save_dataset(part, path)
        paths.append(path)
    _write_effective_config(args, "split", args.out)
    sizes = ", ".join(str(len(p)) for p in parts)
    print(f"split {len(gold)} documents into [{sizes}] -> {', '.join(paths)}")
    return 0


def cmd_learning_curve(args) -> int:
    sims_val = similarity.load_similarity(args.sims_val)
    gold_val = _dataset_with_catalog(args.dataset_val, args.catalog, sims_val.label_names)
    sims_test = similarity.load_similarity(args.sims_test)
    gold_test = _dataset_with_catalog(args.dataset_test, args.catalog, sims_test.label_names)
    sizes = None
    if args.sizes:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    result = sampling.learning_curve(
        sims_val, gold_val, sims_test, gold_test,
        sizes=sizes, repeats=args.repeats, base_seed=args.seed,
        grid=_grid_from_args(args), tie_break=args.tie_break,
        macro_over=args.macro_over,
    )
    atomic_write_text(args.out + ".csv", sampling.curve_csv_text(result))
    sidecar = {
        "reference": result.reference,
        "points": [
            {
                "size": p.size, "repeat": p.repeat, "seed": p.seed, "ok": p.ok,
                "macro_f1": p.macro_f1, "micro_f1": p.micro_f1, "p_at_1": p.p_at_1,
                "thresholds": p.thresholds, "fallback": p.fallback,
                "positives": p.positives, "reason": p.reason,
            }
            for p in result.points
        ],
    }
    atomic_write_text(args.out + ".json", json.dumps(sidecar, indent=2) + "\n")
    _write_effective_config(args, "learning-curve", args.out)
    ok = sum(1 for p in result.points if p.ok)
    print(
        f"{ok}/{len(result.points)} curve points ok, uniform reference "
        f"maF1={100 * result.reference['macro_f1']:.2f} -> {args.out}.csv/.json"
    )
    return 0


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------

def build_parser():
    parser = _Parser(
        prog="simthresh",
        description="similarity-threshold multi-label classification pipeline",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    registry = {}

    def sub(name, func, help_text):
        sp = subparsers.add_parser(name, help=help_text)
        _common_options(sp)
        sp.set_defaults(func=func)
        registry[name] = sp
        return sp

    sp = sub("build-labels", cmd_build_labels,
             "build label embeddings from a catalog and surface embeddings")
    sp.add_argument("--catalog", required=True, help="label catalog JSON")
    sp.add_argument("--surfaces", required=True,
                    help="surface-embedding JSONL keyed by surface string")
    sp.add_argument("--mode", choices=labelreps.MODES, default="name")
    sp.add_argument("--exclude-name", action="store_true",
                    help="keywords mode: centroid over keywords only")
    sp.add_argument("--out", required=True)

    sp = sub("similarity", cmd_similarity,
             "compute the text-by-label score matrix")
    sp.add_argument("--texts", required=True, help="text embeddings JSONL")
    sp.add_argument("--labels", required=True, help="label embeddings JSONL")
    sp.add_argument("--metric", choices=("cosine", "euclidean"), default="cosine")
    sp.add_argument("--normalize", action="store_true",
                    help="min-max normalize the matrix globally")
    sp.add_argument("--format", choices=("binary", "jsonl"), default="binary")
    sp.add_argument("--out", required=True)

    def add_grid_options(sp):
        sp.add_argument("--grid-lo", type=float, default=None)
        sp.add_argument("--grid-hi", type=float, default=None)
        sp.add_argument("--grid-step", type=float, default=None)
        sp.add_argument("--tie-break", choices=("low", "high"), default="low")

    sp = sub("calibrate", cmd_calibrate, "select decision thresholds")
    sp.add_argument("--sims", required=True, help="validation similarity matrix")
    sp.add_argument("--dataset", required=True, help="validation gold JSONL")
    sp.add_argument("--catalog", default=None)
    sp.add_argument("--method",
                    choices=("fixed05", "norm05", "uniform", "label", "label_specific"),
                    default="label_specific")
    add_grid_options(sp)
    sp.add_argument("--out", required=True)

    sp = sub("predict", cmd_predict, "assign labels by thresholding scores")
    sp.add_argument("--sims", required=True)
    sp.add_argument("--profile", required=True)
    sp.add_argument("--out", required=True)

    sp = sub("evaluate", cmd_evaluate, "score predictions against gold labels")
    sp.add_argument("--preds", required=True)
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--catalog", default=None)
    sp.add_argument("--macro-over", choices=("all", "present"), default="all")
    sp.add_argument("--metric", choices=("cosine", "euclidean"), default="cosine",
                    help="ranking direction for P@1 from stored scores")
    sp.add_argument("--sims", default=None,
                    help="similarity matrix for P@1 (optional)")
    sp.add_argument("--out", required=True)

    sp = sub("explore", cmd_explore, "distribution summaries and pairwise t-tests")
    sp.add_argument("--level", choices=("models", "datasets", "labels"), required=True)
    sp.add_argument("--sims", action="append",
                    help="labels level: PATH; other levels: NAME=PATH, repeatable")
    sp.add_argument("--dataset", default=None, help="gold JSONL (labels level)")
    sp.add_argument("--catalog", default=None)
    sp.add_argument("--equal-var", action="store_true",
                    help="pooled-variance t-test instead of unequal-variance")
    sp.add_argument("--samples-csv", default=None,
                    help="also dump raw samples for external plotting")
    sp.add_argument("--out", required=True)

    sp = sub("mlcm", cmd_mlcm, "multi-label confusion matrix with NTL/NPL axes")
    sp.add_argument("--preds", required=True)
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--catalog", default=None)
    sp.add_argument("--out", required=True, help="output prefix (.csv and .json)")

    sp = sub("split", cmd_split, "stratified multi-label dataset split")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--catalog", default=None)
    sp.add_argument("--fractions", required=True, help="e.g. 0.8,0.2")
    sp.add_argument("--out", required=True, help="output prefix (.partN.jsonl)")

    sp = sub("learning-curve", cmd_learning_curve,
             "calibration quality vs validation sample size")
    sp.add_argument("--sims-val", required=True)
    sp.add_argument("--dataset-val", required=True)
    sp.add_argument("--sims-test", required=True)
    sp.add_argument("--dataset-test", required=True)
    sp.add_argument("--catalog", default=None)
    sp.add_argument("--sizes", default=None, help="e.g. 10,25,50,100")
    sp.add_argument("--repeats", type=int, default=5)
    add_grid_options(sp)
    sp.add_argument("--macro-over", choices=("all", "present"), default="all")
    sp.add_argument("--out", required=True, help="output prefix (.csv and .json)")

    return parser, registry


def _scan_config_and_command(argv, registry):
    config_path = None
    command = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif token.startswith("--config="):
            config_path = token.split("=", 1)[1]
        elif command is None and not token.startswith("-") and token in registry:
            command = token
    return config_path, command


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()

    try:
        config_path, command = _scan_config_and_command(argv, registry)
        if config_path and command:
            mapping = load_config_file(config_path)
            sp = registry[command]
            known = {action.dest for action in sp._actions}
            sp.set_defaults(**{k: v for k, v in mapping.items() if k in known})
            for action in sp._actions:
                # a value from the file satisfies a required flag
                if action.required and action.dest in mapping:
                    action.required = False

        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help()
            return 64
        return args.func(args)
    except SystemExit as exc:  # argparse --help (0) and usage errors (64)
        code = exc.code
        return code if isinstance(code, int) else 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
