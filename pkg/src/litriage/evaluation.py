"""Threshold tuning, confusion metrics, agreement kappa, and McNemar tests.

The decision threshold is tuned by exhaustive sweep over the candidate range
[min score, max score + 1], maximizing training accuracy; under k-fold
cross-validation each fold's threshold is fit on the other k-1 folds and the
held-out fold supplies the test metrics. GENETIC is the positive class.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Callable, Hashable, Iterable, Mapping, Sequence

from .chisq import IndicatorProfile, pvalue_chisq_df1
from .corpus import Citation, DomainLabel, split_folds
from .errors import AlignmentError
from .scoring import Threshold, classify, score_citation

__all__ = [
    "ConfusionCounts",
    "MetricSet",
    "FoldResult",
    "CrossValReport",
    "KappaResult",
    "McNemarResult",
    "confusion",
    "metrics",
    "threshold_sweep",
    "optimize_threshold",
    "cross_validate",
    "cohen_kappa",
    "mcnemar",
    "save_calibration",
]


@dataclass(frozen=True, slots=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(
    predicted: Mapping[str, DomainLabel], gold: Mapping[str, DomainLabel]
) -> ConfusionCounts:
    """Confusion counts of predictions against gold labels, aligned by id."""
    if predicted.keys() != gold.keys():
        missing = gold.keys() - predicted.keys()
        extra = predicted.keys() - gold.keys()
        raise AlignmentError(
            f"prediction/gold id mismatch: {len(missing)} missing, {len(extra)} extra"
        )
    tp = tn = fp = fn = 0
    for cid, pred in predicted.items():
        actual = gold[cid]
        if pred is DomainLabel.GENETIC:
            if actual is DomainLabel.GENETIC:
                tp += 1
            else:
                fp += 1
        else:
            if actual is DomainLabel.GENETIC:
                fn += 1
            else:
                tn += 1
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


@dataclass(frozen=True, slots=True)
class MetricSet:
    """Accuracy, recall, precision, F-measure for the positive class.

    A metric with a zero denominator is reported as 0 and named in
    ``degenerate`` rather than silently dropped, so fold averages stay total.
    """

    acc: float
    rec: float
    pre: float
    f: float
    degenerate: tuple[str, ...] = ()


def metrics(counts: ConfusionCounts) -> MetricSet:
    if counts.total == 0:
        raise ValueError("metrics undefined on an empty evaluation set")
    acc = (counts.tp + counts.tn) / counts.total
    degenerate: list[str] = []
    if counts.tp + counts.fn == 0:
        rec = 0.0
        degenerate.append("recall")
    else:
        rec = counts.tp / (counts.tp + counts.fn)
    if counts.tp + counts.fp == 0:
        pre = 0.0
        degenerate.append("precision")
    else:
        pre = counts.tp / (counts.tp + counts.fp)
    if pre + rec == 0.0:
        f = 0.0
        degenerate.append("f")
    else:
        f = 2.0 * pre * rec / (pre + rec)
    return MetricSet(acc=acc, rec=rec, pre=pre, f=f, degenerate=tuple(degenerate))


# --------------------------------------------------------------------------
# Threshold optimization
# --------------------------------------------------------------------------


def threshold_sweep(
    scores: Sequence[int], labels: Sequence[DomainLabel]
) -> list[tuple[int, float]]:
    """Training accuracy of the `score >= theta` rule at every candidate
    theta in [min score, max score + 1], ascending."""
    if not scores:
        raise ValueError("cannot sweep thresholds over an empty score set")
    if len(scores) != len(labels):
        raise AlignmentError(
            f"scores ({len(scores)}) and labels ({len(labels)}) differ in length"
        )
    out = []
    for theta in range(min(scores), max(scores) + 2):
        correct = sum(
            1 for s, g in zip(scores, labels) if classify(s, theta) is g
        )
        out.append((theta, correct / len(scores)))
    return out


def optimize_threshold(
    scores: Sequence[int], labels: Sequence[DomainLabel]
) -> Threshold:
    """The smallest theta maximizing training accuracy over the sweep."""
    sweep = threshold_sweep(scores, labels)
    best_theta, best_acc = sweep[0]
    for theta, acc in sweep[1:]:
        if acc > best_acc:
            best_theta, best_acc = theta, acc
    return Threshold(theta=best_theta)


# --------------------------------------------------------------------------
# Cross-validation
# --------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class FoldResult:
    fold: int
    theta: int
    metrics: MetricSet
    test_size: int
    sweep: tuple[tuple[int, float], ...]


@dataclass(frozen=True, slots=True)
class CrossValReport:
    per_fold: tuple[FoldResult, ...]
    mean_metrics: MetricSet
    mean_theta: float
    predictions: dict[str, DomainLabel]
    k: int
    seed: int


def _mean_metrics(fold_metrics: Sequence[MetricSet]) -> MetricSet:
    n = len(fold_metrics)
    degenerate = sorted({name for m in fold_metrics for name in m.degenerate})
    return MetricSet(
        acc=sum(m.acc for m in fold_metrics) / n,
        rec=sum(m.rec for m in fold_metrics) / n,
        pre=sum(m.pre for m in fold_metrics) / n,
        f=sum(m.f for m in fold_metrics) / n,
        degenerate=tuple(degenerate),
    )


def cross_validate(
    citations: Sequence[Citation],
    profile: IndicatorProfile | None = None,
    *,
    k: int = 10,
    seed: int = 0,
    profile_builder: Callable[[Sequence[Citation]], IndicatorProfile] | None = None,
) -> CrossValReport:
    """k-fold cross-validation of the threshold.

    The indicator profile is fixed across folds (trained upstream) and only
    theta is tuned per fold, unless ``profile_builder`` is given, in which
    case the profile is refit on each fold's training citations for
    leakage-sensitive studies.
    """
    if profile is None and profile_builder is None:
        raise ValueError("either a profile or a profile_builder is required")
    for c in citations:
        if c.label is None:
            raise ValueError(f"unlabeled citation {c.id!r}")
    folds = split_folds(citations, k, seed)
    per_fold: list[FoldResult] = []
    predictions: dict[str, DomainLabel] = {}
    for fold in range(k):
        train = [c for c in citations if folds.fold_of(c.id) != fold]
        test = [c for c in citations if folds.fold_of(c.id) == fold]
        fold_profile = profile_builder(train) if profile_builder else profile
        assert fold_profile is not None
        train_scores = [score_citation(c, fold_profile) for c in train]
        train_labels = [c.label for c in train]
        sweep = threshold_sweep(train_scores, train_labels)
        theta = optimize_threshold(train_scores, train_labels).theta
        predicted = {
            c.id: classify(score_citation(c, fold_profile), theta) for c in test
        }
        gold = {c.id: c.label for c in test}
        fold_metrics = metrics(confusion(predicted, gold))
        predictions.update(predicted)
        per_fold.append(
            FoldResult(
                fold=fold,
                theta=theta,
                metrics=fold_metrics,
                test_size=len(test),
                sweep=tuple(sweep),
            )
        )
    return CrossValReport(
        per_fold=tuple(per_fold),
        mean_metrics=_mean_metrics([f.metrics for f in per_fold]),
        mean_theta=sum(f.theta for f in per_fold) / k,
        predictions=predictions,
        k=k,
        seed=seed,
    )


# --------------------------------------------------------------------------
# Agreement and paired significance
# --------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class KappaResult:
    kappa: float
    observed_agreement: float
    expected_agreement: float
    degenerate: bool = False


def cohen_kappa(
    labels_a: Sequence[Hashable], labels_b: Sequence[Hashable]
) -> KappaResult:
    """Chance-corrected agreement between two label sequences.

    When both raters are constant and identical the chance agreement is 1 and
    kappa is undefined; the result is flagged degenerate with kappa = nan.
    """
    if len(labels_a) != len(labels_b):
        raise AlignmentError(
            f"label sequences differ in length ({len(labels_a)} vs {len(labels_b)})"
        )
    if not labels_a:
        raise ValueError("kappa undefined on empty sequences")
    n = len(labels_a)
    observed = sum(1 for a, b in zip(labels_a, labels_b) if a == b) / n
    categories = set(labels_a) | set(labels_b)
    expected = sum(
        (sum(1 for a in labels_a if a == c) / n)
        * (sum(1 for b in labels_b if b == c) / n)
        for c in categories
    )
    if expected >= 1.0:
        return KappaResult(
            kappa=float("nan"),
            observed_agreement=observed,
            expected_agreement=expected,
            degenerate=True,
        )
    return KappaResult(
        kappa=(observed - expected) / (1.0 - expected),
        observed_agreement=observed,
        expected_agreement=expected,
    )


@dataclass(frozen=True, slots=True)
class McNemarResult:
    statistic: float
    p_value: float
    n01: int
    n10: int
    no_discordant: bool = False


def mcnemar(
    pred_a: Sequence[DomainLabel],
    pred_b: Sequence[DomainLabel],
    gold: Sequence[DomainLabel],
) -> McNemarResult:
    """Continuity-corrected McNemar test on two classifiers' errors.

    n01 counts citations a got right and b got wrong, n10 the reverse; the
    statistic is (|n01 - n10| - 1)^2 / (n01 + n10), referred to chi-square
    with df = 1. With no discordant pairs the statistic is defined as 0 and
    flagged.
    """
    if not (len(pred_a) == len(pred_b) == len(gold)):
        raise AlignmentError(
            "prediction/gold sequences differ in length: "
            f"{len(pred_a)}, {len(pred_b)}, {len(gold)}"
        )
    n01 = n10 = 0
    for a, b, g in zip(pred_a, pred_b, gold):
        a_ok, b_ok = a is g, b is g
        if a_ok and not b_ok:
            n01 += 1
        elif b_ok and not a_ok:
            n10 += 1
    if n01 + n10 == 0:
        return McNemarResult(
            statistic=0.0, p_value=1.0, n01=0, n10=0, no_discordant=True
        )
    statistic = (abs(n01 - n10) - 1) ** 2 / (n01 + n10)
    return McNemarResult(
        statistic=statistic,
        p_value=pvalue_chisq_df1(statistic),
        n01=n01,
        n10=n10,
    )


# --------------------------------------------------------------------------
# Calibration emission (threshold vs training accuracy)
# --------------------------------------------------------------------------


def _sweep_accuracy_at(sweep: Sequence[tuple[int, float]], theta: int) -> float:
    # Outside the candidate range the decision rule is constant, so the curve
    # extends by clamping.
    lo, hi = sweep[0][0], sweep[-1][0]
    return sweep[min(max(theta, lo), hi) - lo][1]


def save_calibration(report: CrossValReport, dest: str | Path | IO) -> None:
    """Write `fold,theta,accuracy` rows per fold plus averaged `mean` rows."""
    stream, owned = (
        (open(dest, "w", encoding="utf-8", newline=""), True)
        if isinstance(dest, (str, Path))
        else (dest, False)
    )
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["fold", "theta", "accuracy"])
        thetas = sorted({t for f in report.per_fold for t, _ in f.sweep})
        for fold in report.per_fold:
            for theta, acc in fold.sweep:
                writer.writerow([fold.fold, theta, repr(acc)])
        for theta in thetas:
            mean = sum(
                _sweep_accuracy_at(f.sweep, theta) for f in report.per_fold
            ) / len(report.per_fold)
            writer.writerow(["mean", theta, repr(mean)])
    finally:
        if owned:
            stream.close()
