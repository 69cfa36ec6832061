"""Command-line entry point exposing the pipeline as subcommands.

Exit codes: 0 success, 1 usage error, 2 data error.  All randomness flows
from --seed so identical invocations produce byte-identical outputs; every
file-writing run leaves a manifest echoing its configuration next to the
output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import agreement as agreement_mod
from . import baselines, evaluation, synthetic
from .annotation import (
    NEGATIVE,
    SCHEMES,
    LabeledDataset,
    TrainVariant,
    aggregate,
    compose_training,
    load_annotations,
    load_dataset,
    save_dataset,
)
from .corpus import FilterConfig, apply_filters, load_corpus, save_corpus
from .errors import StancemonError
from .evaluation import Algorithm, FoldPlan, TrainSettings, make_folds
from .features import tokenize, vectorize
from .models import ModelArtifact, load_model, predict, save_model

DEFAULT_SEED = 42


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits 1 on usage errors (2 is for data errors)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _manifest_payload(args: argparse.Namespace) -> dict:
    arguments = {}
    for key, value in sorted(vars(args).items()):
        if key in ("func", "command"):
            continue
        arguments[key] = str(value) if isinstance(value, Path) else value
    return {"command": args.command, "arguments": arguments}


def _write_manifest(target: Path, args: argparse.Namespace) -> None:
    if target.is_dir():
        path = target / "manifest.json"
    else:
        path = target.with_name(target.name + ".manifest.json")
    path.write_text(
        json.dumps(_manifest_payload(args), indent=1, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _emit(args: argparse.Namespace, table: str, payload: dict) -> None:
    """Print a report as an aligned table or as JSON, echoing the config."""
    if args.format == "json":
        payload = dict(payload)
        payload["config"] = _manifest_payload(args)
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        print(table, end="" if table.endswith("\n") else "\n")
        print(f"# config {json.dumps(_manifest_payload(args), sort_keys=True)}")


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_filter(args) -> int:
    tweets = load_corpus(args.infile, format=args.in_format)
    blacklist = tuple(t for t in args.blacklist.lower().split(",") if t)
    config = FilterConfig(
        remove_retweets=not args.keep_retweets,
        remove_urls=not args.keep_urls,
        blacklist=blacklist,
    )
    kept, report = apply_filters(tweets, config)
    save_corpus(kept, args.out)
    _write_manifest(args.out, args)
    table = (
        f"{'stage':<18}{'messages':>10}\n"
        f"{'before':<18}{report.before:>10}\n"
        f"{'after retweets':<18}{report.after_retweets:>10}\n"
        f"{'after urls':<18}{report.after_urls:>10}\n"
        f"{'after blacklist':<18}{report.after_blacklist:>10}\n"
    )
    _emit(args, table, {
        "before": report.before,
        "after_retweets": report.after_retweets,
        "after_urls": report.after_urls,
        "after_blacklist": report.after_blacklist,
    })
    return 0


def _cmd_aggregate(args) -> int:
    records = load_annotations(args.annotations, format=args.annotations_format)
    tweets = {t.id: t for t in load_corpus(args.tweets, format=args.tweets_format)}
    names = list(SCHEMES) if args.scheme == "all" else [args.scheme]
    args.out_dir.mkdir(parents=True, exist_ok=True)
    lines = [f"{'scheme':<22}{'label':<24}{'strict':>8}{'lax':>8}{'one':>8}"]
    payload: dict = {}
    for name in names:
        scheme = SCHEMES[name]
        dataset = aggregate(records, tweets, scheme)
        save_dataset(dataset, args.out_dir / f"dataset_{name}.json")
        payload[name] = {}
        for label in scheme.categories:
            counts = [
                sum(1 for inst in tier if inst.label == label)
                for tier in (dataset.strict, dataset.lax, dataset.one)
            ]
            payload[name][label] = {
                "strict": counts[0], "lax": counts[1], "one": counts[2],
            }
            lines.append(
                f"{name:<22}{label:<24}{counts[0]:>8}{counts[1]:>8}{counts[2]:>8}"
            )
    _write_manifest(args.out_dir, args)
    _emit(args, "\n".join(lines) + "\n", payload)
    return 0


_CATEGORIZATIONS = ("relevance", "subject", "stance", "sentiment")


def _cmd_agreement(args) -> int:
    records = load_annotations(args.annotations, format=args.annotations_format)
    by_tweet: dict[str, list] = {}
    for record in records:
        by_tweet.setdefault(record.tweet_id, []).append(record)

    lines = []
    payload: dict = {}
    for categorization in _CATEGORIZATIONS:
        units = []
        for tweet_id, group in by_tweet.items():
            values = [
                getattr(record, categorization).value
                for record in group
                if getattr(record, categorization) is not None
            ]
            units.append((tweet_id, values))
        try:
            report = agreement_mod.build_report(units)
        except ValueError:
            lines.append(f"{categorization}: no doubly annotated units")
            payload[categorization] = None
            continue
        alpha = "undefined" if report.alpha is None else f"{report.alpha:.3f}"
        lines.append(f"{categorization}  (units with 2 annotations: {report.n_units})")
        lines.append(f"  percent agreement    {report.percent_agreement:.3f}")
        lines.append(f"  krippendorff alpha   {alpha}")
        for category, score in report.mutual_f.items():
            lines.append(f"  mutual F {category:<20} {score:.3f}")
        payload[categorization] = {
            "percent_agreement": report.percent_agreement,
            "alpha": report.alpha,
            "mutual_f": dict(report.mutual_f),
            "n_units": report.n_units,
        }
    _emit(args, "\n".join(lines) + "\n", payload)
    return 0


def _settings_from_args(args) -> TrainSettings:
    return TrainSettings(
        vocabulary_size=args.vocab_size,
        mnb_alpha=args.mnb_alpha,
        mnb_fit_prior=args.fit_prior,
        svm_c=args.svm_c,
    )


def _cmd_train(args) -> int:
    dataset = load_dataset(args.dataset)
    variant = TrainVariant(args.variant)
    algorithm = Algorithm(args.algorithm)
    training = compose_training(dataset, variant)
    model, vocabulary = evaluation.train_from_instances(
        training, dataset.scheme, algorithm,
        settings=_settings_from_args(args), seed_key=(args.seed,),
    )
    artifact = ModelArtifact(
        kind=algorithm.value, scheme=dataset.scheme.name,
        vocabulary=vocabulary, model=model,
    )
    save_model(artifact, args.out)
    _write_manifest(args.out, args)
    table = (
        f"trained {algorithm.value} on {len(training)} instances "
        f"({dataset.scheme.name}, {variant.value}); vocabulary {len(vocabulary)}\n"
    )
    _emit(args, table, {
        "algorithm": algorithm.value,
        "scheme": dataset.scheme.name,
        "variant": variant.value,
        "train_size": len(training),
        "vocabulary_size": len(vocabulary),
        "classes": list(model.classes),
    })
    return 0


def _plan_for(dataset: LabeledDataset, args) -> FoldPlan:
    return make_folds(dataset.strict, k=args.folds, seed=args.seed)


def _cell_name(scheme: str, variant: TrainVariant, algorithm: Algorithm) -> str:
    return f"{scheme}/{variant.value}/{algorithm.value}"


def _cmd_eval(args) -> int:
    settings = _settings_from_args(args)
    cells: dict[str, evaluation.EvalReport] = {}
    if args.grid:
        if args.dataset_dir is None:
            raise StancemonError("--grid requires --dataset-dir")
        for name in SCHEMES:
            dataset = load_dataset(args.dataset_dir / f"dataset_{name}.json")
            plan = _plan_for(dataset, args)
            for variant in TrainVariant:
                for algorithm in Algorithm:
                    report = evaluation.cross_validate(
                        dataset, variant, None, algorithm, plan, settings=settings
                    )
                    cells[_cell_name(name, variant, algorithm)] = report
        header = f"{'training data':<16}{'clf':<6}" + "".join(
            f"{name:>26}" for name in SCHEMES
        )
        lines = [header, f"{'':<22}" + f"{'F1':>20}{'AUC':>6}" * len(SCHEMES)]
        for variant in TrainVariant:
            for algorithm in Algorithm:
                row = f"{variant.value:<16}{algorithm.value:<6}"
                for name in SCHEMES:
                    report = cells[_cell_name(name, variant, algorithm)]
                    row += f"{report.f1:>20.3f}{report.auc:>6.3f}"
                lines.append(row)
        table = "\n".join(lines) + "\n"
    else:
        if args.dataset is None:
            raise StancemonError("provide --dataset, or --grid with --dataset-dir")
        dataset = load_dataset(args.dataset)
        scheme = SCHEMES[args.scheme] if args.scheme else None
        variant = TrainVariant(args.variant)
        algorithm = Algorithm(args.algorithm)
        plan = _plan_for(dataset, args)
        report = evaluation.cross_validate(
            dataset, variant, scheme, algorithm, plan, settings=settings
        )
        name = _cell_name(dataset.scheme.name, variant, algorithm)
        cells[name] = report
        table = evaluation.render_report_table(report, title=name)

    payload = {name: evaluation.report_to_dict(r) for name, r in cells.items()}
    if args.out:
        args.out.write_text(evaluation.reports_to_json(cells), encoding="utf-8")
        _write_manifest(args.out, args)
    _emit(args, table, payload)
    return 0


def _cmd_curve(args) -> int:
    dataset = load_dataset(args.dataset)
    plan = _plan_for(dataset, args)
    points = evaluation.learning_curve(
        dataset, TrainVariant(args.variant), Algorithm(args.algorithm), plan,
        steps=args.steps, settings=_settings_from_args(args),
    )
    csv_text = evaluation.curve_to_csv(points)
    args.out.write_text(csv_text, encoding="utf-8")
    _write_manifest(args.out, args)
    _emit(args, csv_text, {
        "points": [
            {"x": p.x, "precision": p.precision, "recall": p.recall, "f1": p.f1, "auc": p.auc}
            for p in points
        ]
    })
    return 0


def _cmd_sweep(args) -> int:
    dataset = load_dataset(args.dataset)
    plan = _plan_for(dataset, args)
    run = evaluation.run_cross_validation(
        dataset, TrainVariant(args.variant), Algorithm(args.algorithm), plan,
        settings=_settings_from_args(args),
    )
    scored = [
        (row.prediction.negative_score(), row.gold == NEGATIVE) for row in run.rows
    ]
    points = evaluation.threshold_sweep(scored)
    csv_text = evaluation.curve_to_csv(points)
    args.out.write_text(csv_text, encoding="utf-8")
    _write_manifest(args.out, args)
    _emit(args, csv_text, {
        "points": [
            {"threshold": p.x, "precision": p.precision, "recall": p.recall, "f1": p.f1}
            for p in points
        ]
    })
    return 0


def _cmd_ensemble(args) -> int:
    dataset = load_dataset(args.dataset)
    plan = _plan_for(dataset, args)
    variant = TrainVariant(args.variant)
    algorithm = Algorithm(args.algorithm)
    run = evaluation.run_cross_validation(
        dataset, variant, algorithm, plan, settings=_settings_from_args(args)
    )
    lexicon = (
        baselines.load_demo_lexicon()
        if args.lexicon == "demo"
        else baselines.load_lexicon(args.lexicon)
    )
    baseline = evaluation.evaluate_lexicon_baseline(dataset, lexicon, plan, variant)
    ml_labels = [row.prediction.label for row in run.rows]
    table2x2 = evaluation.system_agreement_table(baseline.labels, ml_labels)

    ensemble_labels = [
        evaluation.ensemble_predict(ml, rule)
        for ml, rule in zip(ml_labels, baseline.labels)
    ]
    gold = [row.gold == NEGATIVE for row in run.rows]
    flagged = [label == NEGATIVE for label in ensemble_labels]
    precision, recall, f1 = evaluation.binary_prf(gold, flagged)

    table = evaluation.render_agreement_table(table2x2, "lexicon", "ml")
    table += (
        f"\nml        precision {run.report.precision:.3f} recall {run.report.recall:.3f} "
        f"f1 {run.report.f1:.3f}\n"
        f"lexicon   precision {baseline.report.precision:.3f} "
        f"recall {baseline.report.recall:.3f} f1 {baseline.report.f1:.3f}\n"
        f"ensemble  precision {precision:.3f} recall {recall:.3f} f1 {f1:.3f}\n"
    )
    payload = {
        "agreement_table": {
            "other_other": table2x2.other_other,
            "other_negative": table2x2.other_negative,
            "negative_other": table2x2.negative_other,
            "negative_negative": table2x2.negative_negative,
        },
        "ml": evaluation.report_to_dict(run.report),
        "lexicon": evaluation.report_to_dict(baseline.report),
        "ensemble": {"precision": precision, "recall": recall, "f1": f1},
    }
    if args.out:
        args.out.write_text(
            json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8"
        )
        _write_manifest(args.out, args)
    _emit(args, table, payload)
    return 0


def _cmd_predict(args) -> int:
    artifact = load_model(args.model)
    texts: list[str] = list(args.text or [])
    if args.infile:
        for tweet in load_corpus(args.infile, format="jsonl"):
            texts.append(tweet.text)
    if not texts:
        raise StancemonError("nothing to predict: pass --text or --in")
    rows = []
    for text in texts:
        vec = vectorize(tokenize(text), artifact.vocabulary)
        prediction = predict(artifact.model, vec)
        rows.append(
            {
                "text": text,
                "label": prediction.label,
                "negative_score": prediction.negative_score(),
                "scores": prediction.scores,
            }
        )
    if args.format == "json":
        for row in rows:
            print(json.dumps(row, ensure_ascii=False, sort_keys=True))
    else:
        for row in rows:
            print(f"{row['label']:<24}{row['negative_score']:.4f}  {row['text']}")
    return 0


def _cmd_synth(args) -> int:
    tweets_path, annotations_path = synthetic.write_corpus(
        args.out_dir, seed=args.seed, size=args.size
    )
    _write_manifest(args.out_dir, args)
    _emit(args, f"wrote {tweets_path}\nwrote {annotations_path}\n", {
        "tweets": str(tweets_path),
        "annotations": str(annotations_path),
    })
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServeConfig, create_app

    blacklist = tuple(t for t in args.blacklist.lower().split(",") if t)
    config = ServeConfig(
        model_path=args.model,
        data_dir=args.data_dir,
        base_dataset_path=args.base_dataset,
        variant=TrainVariant(args.variant),
        algorithm=Algorithm(args.algorithm),
        flag_threshold=args.flag_threshold,
        filter_config=FilterConfig(blacklist=blacklist),
        settings=_settings_from_args(args),
        seed=args.seed,
        static_dir=args.static_dir,
    )
    uvicorn.run(create_app(config), host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# Parser assembly


def _add_common(parser, seed=True):
    parser.add_argument("--format", choices=("table", "json"), default="table",
                        help="report rendering on stdout")
    if seed:
        parser.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _add_train_settings(parser):
    parser.add_argument("--vocab-size", type=int, default=15000)
    parser.add_argument("--mnb-alpha", type=float, default=0.0)
    parser.add_argument("--fit-prior", action="store_true",
                        help="fit the MNB class prior instead of muting it")
    parser.add_argument("--svm-c", type=float, default=1.0)


def _add_cv(parser):
    parser.add_argument("--variant", choices=[v.value for v in TrainVariant],
                        default=TrainVariant.STRICT.value)
    parser.add_argument("--algorithm", choices=[a.value for a in Algorithm],
                        default=Algorithm.SVM.value)
    parser.add_argument("--folds", type=int, default=10)
    _add_train_settings(parser)


def build_parser() -> _Parser:
    parser = _Parser(prog="stancemon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("filter", help="filter a tweet corpus")
    p.add_argument("--in", dest="infile", type=Path, required=True)
    p.add_argument("--in-format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--blacklist", default="dier,landbouw,teek")
    p.add_argument("--keep-retweets", action="store_true")
    p.add_argument("--keep-urls", action="store_true")
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("aggregate", help="aggregate annotations into labeled datasets")
    p.add_argument("--annotations", type=Path, required=True)
    p.add_argument("--annotations-format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--tweets", type=Path, required=True)
    p.add_argument("--tweets-format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--scheme", choices=("all", *SCHEMES), default="all")
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("agreement", help="inter-annotator agreement report")
    p.add_argument("--annotations", type=Path, required=True)
    p.add_argument("--annotations-format", choices=("csv", "jsonl"), default="csv")
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_agreement)

    p = sub.add_parser("train", help="train a model artifact")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--variant", choices=[v.value for v in TrainVariant],
                   default=TrainVariant.STRICT_LAX.value)
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm],
                   default=Algorithm.SVM.value)
    p.add_argument("--out", type=Path, required=True)
    _add_train_settings(p)
    _add_common(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="cross-validate one cell or the full grid")
    p.add_argument("--dataset", type=Path)
    p.add_argument("--dataset-dir", type=Path)
    p.add_argument("--grid", action="store_true")
    p.add_argument("--scheme", choices=tuple(SCHEMES), default=None,
                   help="assert the dataset uses this scheme")
    p.add_argument("--out", type=Path, help="write reports as JSON")
    _add_cv(p)
    _add_common(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("curve", help="learning curve CSV")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--out", type=Path, required=True)
    _add_cv(p)
    _add_common(p)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("sweep", help="negative-threshold sweep CSV")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    _add_cv(p)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ensemble", help="ML+lexicon agreement table and OR-ensemble")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--lexicon", default="demo",
                   help="lexicon TSV path, or 'demo' for the bundled one")
    p.add_argument("--out", type=Path)
    _add_cv(p)
    _add_common(p)
    p.set_defaults(func=_cmd_ensemble)

    p = sub.add_parser("predict", help="predict labels for texts")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--text", action="append")
    p.add_argument("--in", dest="infile", type=Path)
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("synth", help="materialize the synthetic corpus")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--size", type=int, default=synthetic.DEFAULT_SIZE)
    _add_common(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("serve", help="start the review service")
    p.add_argument("--model", type=Path)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", type=Path)
    p.add_argument("--base-dataset", type=Path)
    p.add_argument("--variant", choices=[v.value for v in TrainVariant],
                   default=TrainVariant.STRICT_LAX.value)
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm],
                   default=Algorithm.SVM.value)
    p.add_argument("--flag-threshold", type=float, default=None,
                   help="flag when negative score >= this; default flags by label")
    p.add_argument("--blacklist", default="dier,landbouw,teek")
    p.add_argument("--static-dir", type=Path, help="web UI bundle to serve at /")
    _add_train_settings(p)
    _add_common(p)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StancemonError as exc:
        print(f"stancemon: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"stancemon: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"stancemon: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
