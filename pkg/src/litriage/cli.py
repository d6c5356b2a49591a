"""Command-line pipeline: ingest -> train -> score -> evaluate -> compare.

Every command resolves its settings with precedence flags > --config file >
LITRIAGE_* environment variables > built-in defaults, and writes the fully
resolved configuration (with the toolkit version and a config hash) next to
its outputs, so any run can be reproduced from its artifacts alone.

Exit codes: 0 success, 1 usage, 2 unreadable/unparseable input, 3 degenerate
data, 4 missing artifact, 5 id misalignment.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .chisq import (
    CRITICAL_VALUE_P05,
    build_indicator_profile,
    load_indicator_profile,
    save_indicator_profile,
)
from .contingency import build_profile, save_profile
from .corpus import (
    Citation,
    DomainLabel,
    ParseIssue,
    default_check_tags,
    label_by_reference,
    parse_jsonl,
    parse_medline_xml,
    parse_tsv,
    read_exclusion_list,
    read_reference_list,
    split_folds,
    write_jsonl,
)
from .errors import (
    AlignmentError,
    CorpusFormatError,
    DegenerateCorpusError,
    LitriageError,
    MissingArtifactError,
)
from .evaluation import (
    MetricSet,
    cohen_kappa,
    confusion,
    cross_validate,
    mcnemar,
    metrics,
    save_calibration,
)
from .scoring import classify, save_histogram, save_scores, score_corpus
from .textpipe import PipelineConfig, cross_val_predict_nb, load_stopwords

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_MISSING = 4
EXIT_ALIGNMENT = 5

_FORMATS = ("jsonl", "medline-xml", "tsv")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the pipeline contract reserves 2 for
    # input problems, so route usage failures through exit code 1.
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


# --------------------------------------------------------------------------
# Config resolution
# --------------------------------------------------------------------------


def _from_env(name: str, converter: Callable[[str], Any]) -> Any | None:
    raw = os.environ.get("LITRIAGE_" + name.upper())
    if raw is None:
        return None
    if converter is _flag:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return converter(raw)


def _flag(value: str) -> bool:
    return value.strip().lower() in ("1", "true", "yes", "on")


def resolve_config(
    args: argparse.Namespace,
    spec: dict[str, tuple[Callable[[str], Any], Any]],
) -> dict[str, Any]:
    """Merge defaults, environment, config file, and flags (highest last)."""
    resolved = {name: default for name, (_, default) in spec.items()}
    for name, (converter, _) in spec.items():
        env_value = _from_env(name, converter)
        if env_value is not None:
            resolved[name] = env_value
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                file_values = json.load(fh)
        except OSError as exc:
            raise CorpusFormatError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"config file is not valid JSON: {exc}") from exc
        for key, value in file_values.items():
            if key in resolved:
                resolved[key] = value
    for name in spec:
        cli_value = getattr(args, name, None)
        if cli_value is not None:
            resolved[name] = cli_value
    return resolved


def _config_hash(resolved: dict[str, Any]) -> str:
    canonical = json.dumps(resolved, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _write_json(path: Path, payload: dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _emit_config(out_dir: Path, command: str, resolved: dict[str, Any]) -> str:
    digest = _config_hash(resolved)
    _write_json(
        out_dir / f"{command}_config.json",
        {
            "command": command,
            "config": resolved,
            "config_hash": digest,
            "toolkit_version": __version__,
        },
    )
    return digest


def _out_dir(resolved: dict[str, Any]) -> Path:
    out = Path(resolved["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


# --------------------------------------------------------------------------
# Shared loading helpers
# --------------------------------------------------------------------------


def _read_corpus(path: str) -> list[Citation]:
    if not Path(path).is_file():
        raise CorpusFormatError(f"cannot read corpus: {path}")
    return list(parse_jsonl(path))


def _load_exclusion(setting: str) -> frozenset[str]:
    if setting == "default":
        return default_check_tags()
    if setting == "none":
        return frozenset()
    if not Path(setting).is_file():
        raise CorpusFormatError(f"cannot read exclusion list: {setting}")
    return read_exclusion_list(setting)


def _ensure_labels(
    citations: list[Citation], resolved: dict[str, Any]
) -> list[Citation]:
    if resolved.get("reference_list"):
        ref_path = resolved["reference_list"]
        if not Path(ref_path).is_file():
            raise CorpusFormatError(f"cannot read reference list: {ref_path}")
        reference = read_reference_list(ref_path, column=resolved["ref_column"])
        return label_by_reference(citations, reference)
    unlabeled = [c.id for c in citations if c.label is None]
    if unlabeled:
        raise DegenerateCorpusError(
            f"{len(unlabeled)} citations are unlabeled and no reference list "
            f"was given (first: {unlabeled[0]!r})"
        )
    return citations


def _load_indicator(path: str):
    if not Path(path).is_file():
        raise MissingArtifactError(f"indicator profile not found: {path}")
    try:
        return load_indicator_profile(path)
    except ValueError as exc:
        raise MissingArtifactError(str(exc)) from exc


def _metrics_dict(m: MetricSet) -> dict[str, Any]:
    return {
        "acc": m.acc,
        "rec": m.rec,
        "pre": m.pre,
        "f": m.f,
        "degenerate": list(m.degenerate),
    }


# --------------------------------------------------------------------------
# ingest
# --------------------------------------------------------------------------

_INGEST_SPEC = {
    "input": (str, None),
    "format": (str, "jsonl"),
    "output_dir": (str, "."),
    "skip_bad_records": (_flag, False),
}


def cmd_ingest(args: argparse.Namespace) -> int:
    resolved = resolve_config(args, _INGEST_SPEC)
    if not resolved["input"]:
        raise _UsageError("--input is required")
    if resolved["format"] not in _FORMATS:
        raise _UsageError(f"--format must be one of {_FORMATS}")
    source = Path(resolved["input"])
    if not source.is_file():
        raise CorpusFormatError(f"cannot read input: {source}")
    out = _out_dir(resolved)
    digest = _emit_config(out, "ingest", resolved)

    issues: list[ParseIssue] = []
    skip = resolved["skip_bad_records"]
    parser = {
        "jsonl": parse_jsonl,
        "medline-xml": parse_medline_xml,
        "tsv": parse_tsv,
    }[resolved["format"]]

    stats = {
        "citations": 0,
        "missing_abstract": 0,
        "no_descriptors": 0,
        "duplicate_ids_skipped": 0,
        "labeled": 0,
    }
    seen: set[str] = set()

    def stream():
        for citation in parser(source, skip_bad_records=skip, issues=issues):
            if citation.id in seen:
                stats["duplicate_ids_skipped"] += 1
                issue = ParseIssue(record=-1, message=f"duplicate id {citation.id!r}")
                if not skip:
                    raise CorpusFormatError(issue.message)
                issues.append(issue)
                continue
            seen.add(citation.id)
            stats["citations"] += 1
            if citation.abstract is None:
                stats["missing_abstract"] += 1
            if not citation.descriptors:
                stats["no_descriptors"] += 1
            if citation.label is not None:
                stats["labeled"] += 1
            yield citation

    write_jsonl(stream(), out / "corpus.jsonl")
    stats["skipped_records"] = len(issues)
    _write_json(
        out / "ingest_stats.json",
        {
            "stats": stats,
            "issues": [
                {"record": i.record, "message": i.message, "line": i.line}
                for i in issues
            ],
            "config_hash": digest,
            "toolkit_version": __version__,
        },
    )
    print(
        f"ingest: {stats['citations']} citations "
        f"({stats['no_descriptors']} without descriptors, "
        f"{stats['missing_abstract']} without abstract, "
        f"{len(issues)} records skipped) -> {out / 'corpus.jsonl'}"
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# train
# --------------------------------------------------------------------------

_TRAIN_SPEC = {
    "corpus": (str, None),
    "reference_list": (str, None),
    "ref_column": (int, 0),
    "exclusion_list": (str, "default"),
    "critical_value": (float, CRITICAL_VALUE_P05),
    "output_dir": (str, "."),
}


def cmd_train(args: argparse.Namespace) -> int:
    resolved = resolve_config(args, _TRAIN_SPEC)
    if not resolved["corpus"]:
        raise _UsageError("--corpus is required")
    citations = _ensure_labels(_read_corpus(resolved["corpus"]), resolved)
    exclusion = _load_exclusion(resolved["exclusion_list"])
    out = _out_dir(resolved)
    digest = _emit_config(out, "train", resolved)

    frequency = build_profile(citations, exclusion)
    indicators = build_indicator_profile(
        frequency, exclusion, resolved["critical_value"]
    )
    save_profile(frequency, out / "frequency_profile.csv")
    save_indicator_profile(indicators, out / "indicator_profile.csv")
    summary = {
        "citations": len(citations),
        "genetic_total": frequency.genetic_total,
        "nongenetic_total": frequency.nongenetic_total,
        "descriptors_seen": len(frequency.descriptors()),
        "significant": indicators.significant_count,
        "positive_indicators": indicators.positive_count,
        "negative_indicators": indicators.negative_count,
        "neutral_significant_dropped": indicators.neutral_significant,
        "degenerate_skipped": indicators.degenerate_skipped,
        "config_hash": digest,
        "toolkit_version": __version__,
    }
    _write_json(out / "train_summary.json", summary)
    print(
        f"train: {summary['significant']} significant descriptors "
        f"({summary['positive_indicators']} positive, "
        f"{summary['negative_indicators']} negative) "
        f"out of {summary['descriptors_seen']} -> {out / 'indicator_profile.csv'}"
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# score
# --------------------------------------------------------------------------

_SCORE_SPEC = {
    "corpus": (str, None),
    "profile": (str, None),
    "theta": (int, 3),
    "workers": (int, 0),
    "output_dir": (str, "."),
}


def cmd_score(args: argparse.Namespace) -> int:
    resolved = resolve_config(args, _SCORE_SPEC)
    if not resolved["corpus"]:
        raise _UsageError("--corpus is required")
    if not resolved["profile"]:
        raise _UsageError("--profile is required")
    profile = _load_indicator(resolved["profile"])
    citations = _read_corpus(resolved["corpus"])
    workers = resolved["workers"] or (os.cpu_count() or 1)
    out = _out_dir(resolved)
    digest = _emit_config(out, "score", resolved)

    report = score_corpus(citations, profile, workers=workers)
    theta = resolved["theta"]
    save_scores(report, theta, out / "scores.csv")
    save_histogram(report, out / "histogram.csv")
    no_descriptors = sum(1 for c in citations if not c.descriptors)
    genetic = sum(1 for s in report.scores.values() if s >= theta)
    _write_json(
        out / "score_stats.json",
        {
            "citations": report.total,
            "theta": theta,
            "classified_genetic": genetic,
            "classified_nongenetic": report.total - genetic,
            "no_descriptors": no_descriptors,
            "config_hash": digest,
            "toolkit_version": __version__,
        },
    )
    print(
        f"score: {report.total} citations at theta={theta} "
        f"({genetic} genetic, {report.total - genetic} nongenetic, "
        f"{no_descriptors} had no descriptors) -> {out / 'scores.csv'}"
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# evaluate
# --------------------------------------------------------------------------

_EVALUATE_SPEC = {
    "corpus": (str, None),
    "profile": (str, None),
    "reference_list": (str, None),
    "ref_column": (int, 0),
    "k": (int, 10),
    "seed": (int, 0),
    "refit_per_fold": (_flag, False),
    "exclusion_list": (str, "default"),
    "critical_value": (float, CRITICAL_VALUE_P05),
    "output_dir": (str, "."),
}


def cmd_evaluate(args: argparse.Namespace) -> int:
    resolved = resolve_config(args, _EVALUATE_SPEC)
    if not resolved["corpus"]:
        raise _UsageError("--corpus is required")
    if not resolved["profile"]:
        raise _UsageError("--profile is required")
    profile = _load_indicator(resolved["profile"])
    citations = _ensure_labels(_read_corpus(resolved["corpus"]), resolved)
    out = _out_dir(resolved)
    digest = _emit_config(out, "evaluate", resolved)

    builder = None
    if resolved["refit_per_fold"]:
        exclusion = _load_exclusion(resolved["exclusion_list"])
        critical = resolved["critical_value"]

        def builder(train):
            return build_indicator_profile(
                build_profile(train, exclusion), exclusion, critical
            )

    report = cross_validate(
        citations,
        profile if builder is None else None,
        k=resolved["k"],
        seed=resolved["seed"],
        profile_builder=builder,
    )
    save_calibration(report, out / "calibration.csv")
    with open(out / "predictions.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label"])
        for cid in sorted(report.predictions):
            writer.writerow([cid, report.predictions[cid].value])
    _write_json(
        out / "evaluation.json",
        {
            "k": report.k,
            "seed": report.seed,
            "refit_per_fold": resolved["refit_per_fold"],
            "per_fold": [
                {
                    "fold": f.fold,
                    "theta": f.theta,
                    "test_size": f.test_size,
                    "metrics": _metrics_dict(f.metrics),
                }
                for f in report.per_fold
            ],
            "theta_per_fold": [f.theta for f in report.per_fold],
            "mean_theta": report.mean_theta,
            "mean_metrics": _metrics_dict(report.mean_metrics),
            "config_hash": digest,
            "toolkit_version": __version__,
        },
    )
    thetas = [f.theta for f in report.per_fold]
    m = report.mean_metrics
    print(
        f"evaluate: k={report.k} seed={report.seed} thetas={thetas} "
        f"mean acc={m.acc:.3f} rec={m.rec:.3f} pre={m.pre:.3f} f={m.f:.3f}"
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# compare
# --------------------------------------------------------------------------

_COMPARE_SPEC = {
    "corpus": (str, None),
    "profile": (str, None),
    "reference_list": (str, None),
    "ref_column": (int, 0),
    "k": (int, 10),
    "seed": (int, 0),
    "nb_field": (str, None),
    "nb_min_df": (int, 2),
    "nb_stemmer": (str, "lovins"),
    "stopwords": (str, None),
    "output_dir": (str, "."),
}


def _read_predictions_csv(path: str, corpus_ids: set[str]) -> dict[str, DomainLabel]:
    if not Path(path).is_file():
        raise CorpusFormatError(f"cannot read predictions: {path}")
    predictions: dict[str, DomainLabel] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or row[0] == "id":
                continue
            if len(row) < 2:
                raise CorpusFormatError(f"{path}: expected id,label rows")
            cid, label = row[0], row[1]
            if cid not in corpus_ids:
                raise AlignmentError(f"{path}: unknown citation id {cid!r}")
            predictions[cid] = DomainLabel.from_string(label)
    missing = corpus_ids - predictions.keys()
    if missing:
        raise AlignmentError(
            f"{path}: predictions missing for {len(missing)} corpus citations"
        )
    return predictions


def cmd_compare(args: argparse.Namespace) -> int:
    resolved = resolve_config(args, _COMPARE_SPEC)
    if not resolved["corpus"]:
        raise _UsageError("--corpus is required")
    citations = _ensure_labels(_read_corpus(resolved["corpus"]), resolved)
    gold = {c.id: c.label for c in citations}
    corpus_ids = set(gold)
    out = _out_dir(resolved)

    systems: dict[str, dict[str, DomainLabel]] = {}
    k, seed = resolved["k"], resolved["seed"]

    if resolved["profile"]:
        profile = _load_indicator(resolved["profile"])
        report = cross_validate(citations, profile, k=k, seed=seed)
        systems["scorer"] = report.predictions

    if resolved["nb_field"]:
        stopwords = (
            load_stopwords(resolved["stopwords"])
            if resolved["stopwords"]
            else None
        )
        config = (
            PipelineConfig(
                field_selector=resolved["nb_field"],
                min_df=resolved["nb_min_df"],
                stemmer=resolved["nb_stemmer"],
                stopwords=stopwords,
            )
            if stopwords is not None
            else PipelineConfig(
                field_selector=resolved["nb_field"],
                min_df=resolved["nb_min_df"],
                stemmer=resolved["nb_stemmer"],
            )
        )
        folds = split_folds(citations, k, seed)
        systems[f"nb_{resolved['nb_field']}"] = cross_val_predict_nb(
            citations, config, folds
        )

    for item in args.external or []:
        name, _, path = item.partition("=")
        if not path:
            raise _UsageError("--external takes NAME=PATH")
        systems[name] = _read_predictions_csv(path, corpus_ids)

    if len(systems) < 2:
        raise _UsageError(
            "compare needs at least two prediction sources "
            "(--profile, --nb-field, and/or --external)"
        )
    digest = _emit_config(
        out, "compare", {**resolved, "external": sorted(args.external or [])}
    )

    ordered_ids = sorted(corpus_ids)
    gold_seq = [gold[cid] for cid in ordered_ids]
    per_system = {
        name: _metrics_dict(metrics(confusion(preds, gold)))
        for name, preds in systems.items()
    }
    pairwise = []
    names = sorted(systems)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            seq_a = [systems[a][cid] for cid in ordered_ids]
            seq_b = [systems[b][cid] for cid in ordered_ids]
            test = mcnemar(seq_a, seq_b, gold_seq)
            agreement = cohen_kappa(seq_a, seq_b)
            pairwise.append(
                {
                    "a": a,
                    "b": b,
                    "mcnemar_statistic": test.statistic,
                    "mcnemar_p_value": test.p_value,
                    "n01": test.n01,
                    "n10": test.n10,
                    "no_discordant": test.no_discordant,
                    "kappa": None if agreement.degenerate else agreement.kappa,
                }
            )
    _write_json(
        out / "comparison.json",
        {
            "k": k,
            "seed": seed,
            "citations": len(ordered_ids),
            "systems": per_system,
            "pairwise": pairwise,
            "config_hash": digest,
            "toolkit_version": __version__,
        },
    )
    for row in pairwise:
        print(
            f"compare: {row['a']} vs {row['b']}: "
            f"McNemar={row['mcnemar_statistic']:.3f} p={row['mcnemar_p_value']:.3f} "
            f"(n01={row['n01']}, n10={row['n10']})"
        )
    return EXIT_OK


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="litriage", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def common(p: _Parser) -> None:
        p.add_argument("--config", help="JSON file with option defaults")
        p.add_argument("--output-dir", dest="output_dir")

    p = sub.add_parser("ingest", help="convert a corpus to canonical JSONL")
    common(p)
    p.add_argument("--input")
    p.add_argument("--format", choices=_FORMATS)
    p.add_argument(
        "--skip-bad-records", dest="skip_bad_records", action="store_const", const=True
    )
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="build frequency and indicator profiles")
    common(p)
    p.add_argument("--corpus")
    p.add_argument("--reference-list", dest="reference_list")
    p.add_argument("--ref-column", dest="ref_column", type=int)
    p.add_argument("--exclusion-list", dest="exclusion_list",
                   help="path, 'default' (packaged check tags), or 'none'")
    p.add_argument("--critical-value", dest="critical_value", type=float)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="score citations against a profile")
    common(p)
    p.add_argument("--corpus")
    p.add_argument("--profile")
    p.add_argument("--theta", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("evaluate", help="cross-validated threshold and metrics")
    common(p)
    p.add_argument("--corpus")
    p.add_argument("--profile")
    p.add_argument("--reference-list", dest="reference_list")
    p.add_argument("--ref-column", dest="ref_column", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument(
        "--refit-per-fold", dest="refit_per_fold", action="store_const", const=True
    )
    p.add_argument("--exclusion-list", dest="exclusion_list")
    p.add_argument("--critical-value", dest="critical_value", type=float)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="compare classifiers with McNemar tests")
    common(p)
    p.add_argument("--corpus")
    p.add_argument("--profile")
    p.add_argument("--reference-list", dest="reference_list")
    p.add_argument("--ref-column", dest="ref_column", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--nb-field", dest="nb_field",
                   choices=("title", "abstract", "title_abstract", "descriptors"))
    p.add_argument("--nb-min-df", dest="nb_min_df", type=int)
    p.add_argument("--nb-stemmer", dest="nb_stemmer")
    p.add_argument("--stopwords")
    p.add_argument("--external", action="append", metavar="NAME=PATH",
                   help="external prediction CSV (id,label), repeatable")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help()
            return EXIT_USAGE
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorpusFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateCorpusError, ValueError) as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except MissingArtifactError as exc:
        print(f"missing artifact: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except AlignmentError as exc:
        print(f"alignment error: {exc}", file=sys.stderr)
        return EXIT_ALIGNMENT
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LitriageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
