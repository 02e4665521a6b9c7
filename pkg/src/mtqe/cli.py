"""Command-line frontend.

Subcommands: ter, train, predict, evaluate, tune, significance.
Exit codes: 0 success, 2 usage/data error, 3 numerical failure.
Every run echoes its fully-resolved configuration into the output
header ('#'-prefixed line in TSV outputs, a "config" field in JSON).
"""

import argparse
import json
import sys
from contextlib import nullcontext

import numpy as np

from . import data, kernels, metrics, model_io, pipeline, ter, tuning
from .errors import (
    ConfigError,
    DataError,
    LengthMismatch,
    MtqeError,
    NumericalError,
)
from .mlp import MlpConfig
from .pipeline import NormalizationPolicy, VariantKind
from .svr import SvrConfig

SCHEMA_VERSION = model_io.SCHEMA_VERSION

VARIANT_NAMES = {
    "svm": VariantKind.SVM,
    "quad-svm": VariantKind.QUAD_SVM,
    "mlp": VariantKind.MLP,
    "mlp4": VariantKind.MLP4,
}


def _out_handle(path):
    return open(path, "w", encoding="utf-8") if path else nullcontext(sys.stdout)


def _config_header(cmd: str, resolved: dict) -> str:
    return f"# mtqe {cmd} config: " + json.dumps(resolved, sort_keys=True)


def _parse_hidden(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"invalid hidden layer spec: {text!r}") from None


def _parse_per_op(text: str, cast=float) -> list:
    """Scalar or comma list of 4 per-operation values (ins,del,sub,shift)."""
    parts = text.split(",")
    try:
        values = [cast(p) for p in parts]
    except ValueError:
        raise ConfigError(f"invalid numeric list: {text!r}") from None
    if len(values) == 1:
        return values * 4
    if len(values) != 4:
        raise ConfigError(f"expected 1 or 4 comma-separated values, got {len(values)}")
    return values


# ---------------------------------------------------------------- ter


def cmd_ter(args) -> int:
    lowercase = not args.case_sensitive
    hyps = data.load_sentences(args.hyp, lowercase=lowercase)
    refs = data.load_sentences(args.ref, lowercase=lowercase)
    if len(hyps) != len(refs):
        raise LengthMismatch(
            f"line counts differ at line {min(len(hyps), len(refs)) + 1}: "
            f"{len(hyps)} hypothesis lines vs {len(refs)} reference lines"
        )
    results = ter.score_corpus(
        hyps,
        refs,
        enable_shifts=not args.no_shifts,
        max_shift_span=args.max_shift_span,
        max_shift_dist=args.max_shift_dist,
        backend=args.backend,
        jobs=args.jobs,
    )
    resolved = {
        "hyp": args.hyp,
        "ref": args.ref,
        "case_sensitive": args.case_sensitive,
        "shifts": not args.no_shifts,
        "max_shift_span": args.max_shift_span,
        "max_shift_dist": args.max_shift_dist,
        "backend": args.backend or kernels.backend_name(),
        "jobs": args.jobs,
    }
    with _out_handle(args.out) as out:
        out.write(_config_header("ter", resolved) + "\n")
        out.write("ins\tdel\tsub\tshift\tref_len\thter\n")
        for res in results:
            e = res.edits
            out.write(
                f"{e.insertions}\t{e.deletions}\t{e.substitutions}\t{e.shifts}"
                f"\t{res.ref_word_count}\t{res.hter:.6f}\n"
            )
    return 0


# -------------------------------------------------------------- train


def _model_config_from_args(kind: VariantKind, args):
    if kind in (VariantKind.SVM, VariantKind.QUAD_SVM):
        cs = _parse_per_op(args.c)
        eps = _parse_per_op(args.epsilon)
        gammas = _parse_per_op(args.gamma)
        configs = [
            SvrConfig(
                c=cs[i],
                epsilon=eps[i],
                gamma=gammas[i],
                tol_kkt=args.tol_kkt,
                max_passes=args.max_passes,
            )
            for i in range(4)
        ]
        return configs if kind == VariantKind.QUAD_SVM else configs[0]
    return MlpConfig(
        hidden_sizes=_parse_hidden(args.hidden),
        activation=args.activation,
        alpha=args.alpha,
        tol=args.tol,
        learning_rate=args.learning_rate,
        max_epochs=args.max_epochs,
        batch_size=args.batch_size,
        seed=args.seed,
    )


def cmd_train(args) -> int:
    kind = VARIANT_NAMES[args.variant]
    X = data.load_features(args.features)
    if kind.predicts_edits:
        ds = data.QeDataset(features=X, gold_edits=data.load_edit_counts(args.labels))
    else:
        ds = data.QeDataset(features=X, gold_hter=data.load_hter(args.labels))
    cfg = _model_config_from_args(kind, args)
    policy = NormalizationPolicy(round=args.round, trim=args.trim)
    predictor = pipeline.train_variant(
        kind, ds, cfg, policy=policy, denominator=args.denominator
    )
    model_io.save_predictor(predictor, args.model_out)
    resolved = {
        "variant": args.variant,
        "n": int(X.shape[0]),
        "dims": int(X.shape[1]),
        "policy": policy.to_dict(),
        "denominator": args.denominator,
        "seed": args.seed,
    }
    print(_config_header("train", resolved))
    for i, model in enumerate(predictor.models):
        if kind in (VariantKind.SVM, VariantKind.QUAD_SVM):
            print(
                f"model {i}: {len(model.dual_coefficients)} support vectors, "
                f"bias {model.bias:.6f}, converged={model.converged} "
                f"({model.n_iter} iterations)"
            )
        else:
            print(
                f"model {i}: {len(model.loss_trace)} epochs, "
                f"final loss {model.loss_trace[-1]:.6g}"
            )
    print(f"saved {kind.value} model to {args.model_out}")
    return 0


# ------------------------------------------------------------ predict


def cmd_predict(args) -> int:
    predictor = model_io.load_predictor(args.model)
    X = data.load_features(args.features)
    # Normalization comes from the flags alone: no flags = original labels.
    predictor.policy = NormalizationPolicy(round=args.round, trim=args.trim)
    if args.denominator:
        predictor.denominator = args.denominator
    if predictor.denominator == "reference":
        if not args.ref_sentences:
            raise ConfigError("--denominator reference requires --ref-sentences")
        lengths = data.sentence_lengths(data.load_sentences(args.ref_sentences))
    else:
        lengths = data.sentence_lengths(data.load_sentences(args.sentences))
    hter, edits = pipeline.predict_hter(predictor, X, lengths)
    resolved = {
        "model": args.model,
        "variant": predictor.kind.value,
        "policy": predictor.policy.to_dict(),
        "denominator": predictor.denominator,
    }
    with _out_handle(args.out) as out:
        out.write(_config_header("predict", resolved) + "\n")
        if edits is None:
            for h in hter:
                out.write(f"{h:.6f}\n")
        else:
            for h, row in zip(hter, edits):
                cells = "\t".join(f"{v:.6f}" for v in row)
                out.write(f"{h:.6f}\t{cells}\n")
    return 0


# ----------------------------------------------------------- evaluate


def _load_predictions(path):
    table = data.load_table(path, skip_comments=True)
    if table.shape[1] not in (1, 5):
        raise DataError(
            f"{path}: expected 1 or 5 columns (hter [ins del sub shift]), "
            f"got {table.shape[1]}"
        )
    hter = table[:, 0]
    edits = table[:, 1:5] if table.shape[1] == 5 else None
    return hter, edits


def cmd_evaluate(args) -> int:
    pred_hter, pred_edits = _load_predictions(args.pred)
    gold_hter = data.load_hter(args.gold_hter)
    gold_edits = data.load_edit_counts(args.gold_edits) if args.gold_edits else None
    denoms = None
    if args.sentences:
        denoms = data.sentence_lengths(data.load_sentences(args.sentences))
    report = metrics.evaluate(
        pred_hter,
        gold_hter,
        pred_edits=pred_edits,
        gold_edits=gold_edits,
        denominators=denoms,
    )
    resolved = {
        "pred": args.pred,
        "gold_hter": args.gold_hter,
        "gold_edits": args.gold_edits,
        "sentences": args.sentences,
    }
    doc = {"schema_version": SCHEMA_VERSION, "config": resolved}
    doc.update(report.to_dict())
    print(f"n         {report.n}")
    print(f"rho       {report.rho:.6f}")
    print(f"r2        {report.r2:.6f}")
    if report.rho_edits is not None:
        print(f"rho_edits {report.rho_edits:.6f}")
    if report.rho_hter is not None:
        print(f"rho_hter  {report.rho_hter:.6f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(doc, handle, sort_keys=True, indent=2)
            handle.write("\n")
    return 0


# ------------------------------------------------------- significance


def cmd_significance(args) -> int:
    pred_a, _ = _load_predictions(args.pred_a)
    pred_b, _ = _load_predictions(args.pred_b)
    gold = data.load_hter(args.gold)
    result = metrics.bootstrap_significance(
        pred_a,
        pred_b,
        gold,
        n_samples=args.n_samples,
        alpha=args.alpha,
        seed=args.seed,
        jobs=args.jobs,
    )
    resolved = {
        "pred_a": args.pred_a,
        "pred_b": args.pred_b,
        "gold": args.gold,
        "n_samples": args.n_samples,
        "alpha": args.alpha,
        "seed": args.seed,
    }
    doc = {"schema_version": SCHEMA_VERSION, "config": resolved}
    doc.update(result.to_dict())
    verdict = "significant" if result.significant else "not significant"
    print(
        f"win_fraction {result.win_fraction:.4f} over {result.n_samples} samples: "
        f"A > B is {verdict} at alpha={result.alpha}"
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(doc, handle, sort_keys=True, indent=2)
            handle.write("\n")
    return 0


# --------------------------------------------------------------- tune


def cmd_tune(args) -> int:
    X = data.load_features(args.features)
    kind = VARIANT_NAMES[args.variant]
    gold_hter = data.load_hter(args.gold_hter) if args.gold_hter else None
    gold_edits = data.load_edit_counts(args.gold_edits) if args.gold_edits else None
    lengths = None
    if args.sentences:
        lengths = data.sentence_lengths(data.load_sentences(args.sentences))
    ds = data.QeDataset(
        features=X,
        gold_hter=gold_hter,
        gold_edits=gold_edits,
        target_lengths=lengths,
    )
    grid = None
    if args.grid:
        with open(args.grid, encoding="utf-8") as handle:
            grid = {
                k: [tuple(v) if isinstance(v, list) else v for v in values]
                for k, values in json.load(handle).items()
            }
    measure = None if args.measure == "auto" else tuning.Measure(args.measure.replace("-", "_"))
    spec = tuning.GridSpec(
        variant=kind,
        param_grid=grid or {},
        measure=measure,
        k=args.k,
        seed=args.seed,
    )
    result = tuning.grid_search(spec, ds, jobs=args.jobs)

    resolved = {
        "variant": args.variant,
        "measure": result.measure.value,
        "k": args.k,
        "seed": args.seed,
        "grid": {k: [list(v) if isinstance(v, tuple) else v for v in vs] for k, vs in spec.param_grid.items()},
    }
    param_names = list(spec.param_grid.keys())
    with _out_handle(args.out) as out:
        out.write(_config_header("tune", resolved) + "\n")
        fold_cols = "\t".join(f"fold_{i}" for i in range(args.k))
        out.write("\t".join(param_names) + f"\t{fold_cols}\tmean\n")
        for entry in result.entries:
            cells = [str(entry.params.get(name)) for name in param_names]
            cells += [f"{s:.6f}" for s in entry.fold_scores]
            cells.append(f"{entry.mean_score:.6f}")
            out.write("\t".join(cells) + "\n")
    doc = {"schema_version": SCHEMA_VERSION, "config": resolved}
    doc.update(result.to_dict())
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as handle:
            json.dump(doc, handle, sort_keys=True, indent=2)
            handle.write("\n")
    print(
        f"best config (mean {result.measure.value} {result.best_score:.6f}): "
        + json.dumps(tuning._jsonable(result.best_params), sort_keys=True)
    )
    if args.model_out:
        predictor = tuning.retrain_best(spec, ds, result)
        model_io.save_predictor(predictor, args.model_out)
        print(f"saved retrained best model to {args.model_out}")
    return 0


# --------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtqe",
        description="Sentence-level MT quality estimation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ter", help="score hypothesis/reference files with TER edits and HTER")
    p.add_argument("hyp", help="hypothesis file, one tokenized sentence per line")
    p.add_argument("ref", help="reference file, one tokenized sentence per line")
    p.add_argument("-o", "--out", help="output TSV (default stdout)")
    p.add_argument("--case-sensitive", action="store_true")
    p.add_argument("--no-shifts", action="store_true", help="plain edit distance, no block shifts")
    p.add_argument("--max-shift-span", type=int, default=ter.MAX_SHIFT_SPAN)
    p.add_argument("--max-shift-dist", type=int, default=ter.MAX_SHIFT_DIST)
    p.add_argument("--backend", choices=["compiled", "python"], default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_ter)

    p = sub.add_parser("train", help="train one model variant")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True, help="HTER (1 col) or edit counts (4 cols)")
    p.add_argument("--variant", required=True, choices=sorted(VARIANT_NAMES))
    p.add_argument("--model-out", required=True)
    p.add_argument("--c", default="1.0", help="SVR box constraint (scalar or 4 comma values)")
    p.add_argument("--epsilon", default="0.1", help="SVR tube width")
    p.add_argument("--gamma", default="0.01", help="RBF kernel width")
    p.add_argument("--tol-kkt", type=float, default=1e-3)
    p.add_argument("--max-passes", type=int, default=None)
    p.add_argument("--hidden", default="100", help="MLP hidden sizes, e.g. 300 or 300,150")
    p.add_argument("--activation", choices=["relu", "tanh"], default="relu")
    p.add_argument("--alpha", type=float, default=1e-4, help="MLP L2 penalty")
    p.add_argument("--tol", type=float, default=1e-4, help="MLP convergence tolerance")
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--max-epochs", type=int, default=500)
    p.add_argument("--batch-size", type=int, default=200)
    p.add_argument("--round", action="store_true", help="default rounding policy stored on the model")
    p.add_argument("--trim", action="store_true", help="default trimming policy stored on the model")
    p.add_argument("--denominator", choices=["target", "reference"], default="target")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict HTER (and edit counts) for a feature file")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--sentences", required=True, help="MT output file for sentence lengths")
    p.add_argument("--ref-sentences", help="reference file for oracle denominators")
    p.add_argument("-o", "--out", help="output TSV (default stdout)")
    p.add_argument("--round", action="store_true", help="round predicted counts to integers")
    p.add_argument("--trim", action="store_true", help="clamp predicted counts into [0, length]")
    p.add_argument("--denominator", choices=["target", "reference"], default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="correlation metrics for a prediction file")
    p.add_argument("--pred", required=True, help="prediction TSV from `mtqe predict`")
    p.add_argument("--gold-hter", required=True)
    p.add_argument("--gold-edits", help="gold 4-column edit counts")
    p.add_argument("--sentences", help="MT output file for HTER denominators")
    p.add_argument("-o", "--out", help="JSON report path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("significance", help="paired bootstrap comparison of two systems")
    p.add_argument("--pred-a", required=True)
    p.add_argument("--pred-b", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--n-samples", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--out", help="JSON report path")
    p.set_defaults(func=cmd_significance)

    p = sub.add_parser("tune", help="grid search with k-fold cross-validation")
    p.add_argument("--features", required=True)
    p.add_argument("--gold-hter")
    p.add_argument("--gold-edits")
    p.add_argument("--sentences", help="MT output file for lengths (rho-hter measure)")
    p.add_argument("--variant", required=True, choices=sorted(VARIANT_NAMES))
    p.add_argument(
        "--measure",
        choices=["auto", "r2", "rho-edits", "rho-hter"],
        default="auto",
        help="fold scoring measure (auto: rho-edits for 4-output variants, rho-hter otherwise)",
    )
    p.add_argument("--grid", help="JSON file {param: [values, ...]} overriding the default grid")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--out", help="CV table TSV (default stdout)")
    p.add_argument("--json-out", help="CV result JSON path")
    p.add_argument("--model-out", help="retrain the best config on all data and save it")
    p.set_defaults(func=cmd_tune)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except (MtqeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
