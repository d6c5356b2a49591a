"""Multinomial naive Bayes baseline with Laplace smoothing.

Trained on raw term counts (TF-IDF vectors are accepted, counts are
canonical). Priors are class fractions; ties in the posterior go to the
NONGENETIC majority class.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Mapping, Sequence

from ..corpus import Citation, DomainLabel, FoldAssignment
from .pipeline import PipelineConfig, Vocabulary, build_vocabulary, citation_tokens, count_vector

__all__ = [
    "NBModel",
    "nb_train",
    "nb_predict",
    "train_nb",
    "nb_predict_citation",
    "cross_val_predict_nb",
    "save_nb_model",
    "load_nb_model",
]

_CLASSES = (DomainLabel.GENETIC, DomainLabel.NONGENETIC)


@dataclass(frozen=True, slots=True)
class NBModel:
    class_log_prior: dict[DomainLabel, float]
    feature_log_prob: dict[DomainLabel, list[float]]
    vocabulary: Vocabulary
    alpha: float


def nb_train(
    vectors: Sequence[Mapping[int, float]],
    labels: Sequence[DomainLabel],
    vocabulary: Vocabulary,
    alpha: float = 1.0,
) -> NBModel:
    """Fit priors and smoothed per-class term probabilities from counts."""
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels differ in length")
    if not vectors:
        raise ValueError("cannot train on an empty corpus")
    present = set(labels)
    if len(present) < 2:
        raise ValueError(f"both classes required for training, got only {present}")
    n_docs = len(labels)
    v = len(vocabulary)
    class_log_prior = {
        c: math.log(sum(1 for l in labels if l is c) / n_docs) for c in _CLASSES
    }
    feature_log_prob: dict[DomainLabel, list[float]] = {}
    for c in _CLASSES:
        totals = [0.0] * v
        for vector, label in zip(vectors, labels):
            if label is c:
                for col, count in vector.items():
                    totals[col] += count
        denom = sum(totals) + alpha * v
        feature_log_prob[c] = [math.log((t + alpha) / denom) for t in totals]
    return NBModel(
        class_log_prior=class_log_prior,
        feature_log_prob=feature_log_prob,
        vocabulary=vocabulary,
        alpha=alpha,
    )


def nb_predict(
    model: NBModel, vector: Mapping[int, float]
) -> tuple[DomainLabel, float]:
    """Class and log-odds (genetic minus nongenetic) of one vector.

    An empty vector falls back to the priors. Exact posterior ties resolve
    to NONGENETIC.
    """
    scores = {}
    for c in _CLASSES:
        log_prob = model.feature_log_prob[c]
        scores[c] = model.class_log_prior[c] + sum(
            tf * log_prob[col] for col, tf in vector.items()
        )
    log_odds = scores[DomainLabel.GENETIC] - scores[DomainLabel.NONGENETIC]
    label = DomainLabel.GENETIC if log_odds > 0 else DomainLabel.NONGENETIC
    return label, log_odds


def train_nb(
    citations: Sequence[Citation], config: PipelineConfig, alpha: float = 1.0
) -> NBModel:
    """Tokenize labeled citations per config and fit the model."""
    for c in citations:
        if c.label is None:
            raise ValueError(f"unlabeled citation {c.id!r}")
    token_lists = [citation_tokens(c, config) for c in citations]
    vocabulary = build_vocabulary(token_lists, config.min_df)
    vectors = [count_vector(tokens, vocabulary) for tokens in token_lists]
    return nb_train(vectors, [c.label for c in citations], vocabulary, alpha)


def nb_predict_citation(
    model: NBModel, citation: Citation, config: PipelineConfig
) -> tuple[DomainLabel, float]:
    vector = count_vector(citation_tokens(citation, config), model.vocabulary)
    return nb_predict(model, vector)


def cross_val_predict_nb(
    citations: Sequence[Citation],
    config: PipelineConfig,
    folds: FoldAssignment,
    alpha: float = 1.0,
) -> dict[str, DomainLabel]:
    """Held-out predictions: the model (vocabulary included) is refit on each
    fold's training citations, so no test-fold statistics leak in."""
    predictions: dict[str, DomainLabel] = {}
    for fold in range(folds.k):
        train = [c for c in citations if folds.fold_of(c.id) != fold]
        test = [c for c in citations if folds.fold_of(c.id) == fold]
        model = train_nb(train, config, alpha)
        for citation in test:
            predictions[citation.id], _ = nb_predict_citation(model, citation, config)
    return predictions


# --------------------------------------------------------------------------
# Versioned JSON persistence
# --------------------------------------------------------------------------

_MODEL_FORMAT = "litriage-nb-model-v1"


def save_nb_model(model: NBModel, dest: str | Path | IO) -> None:
    payload = {
        "format": _MODEL_FORMAT,
        "alpha": model.alpha,
        "class_log_prior": {c.value: model.class_log_prior[c] for c in _CLASSES},
        "feature_log_prob": {c.value: model.feature_log_prob[c] for c in _CLASSES},
        "vocabulary": {
            "terms": model.vocabulary.terms(),
            "df": [model.vocabulary.df[t] for t in model.vocabulary.terms()],
            "n_docs": model.vocabulary.n_docs,
        },
    }
    stream, owned = (
        (open(dest, "w", encoding="utf-8"), True)
        if isinstance(dest, (str, Path))
        else (dest, False)
    )
    try:
        json.dump(payload, stream, sort_keys=True)
        stream.write("\n")
    finally:
        if owned:
            stream.close()


def load_nb_model(source: str | Path | IO) -> NBModel:
    stream, owned = (
        (open(source, "r", encoding="utf-8"), True)
        if isinstance(source, (str, Path))
        else (source, False)
    )
    try:
        payload = json.load(stream)
    finally:
        if owned:
            stream.close()
    if payload.get("format") != _MODEL_FORMAT:
        raise ValueError(f"not a {_MODEL_FORMAT} file")
    terms = payload["vocabulary"]["terms"]
    vocabulary = Vocabulary(
        index={t: i for i, t in enumerate(terms)},
        df=dict(zip(terms, payload["vocabulary"]["df"])),
        n_docs=payload["vocabulary"]["n_docs"],
    )
    return NBModel(
        class_log_prior={
            DomainLabel(k): v for k, v in payload["class_log_prior"].items()
        },
        feature_log_prob={
            DomainLabel(k): list(v) for k, v in payload["feature_log_prob"].items()
        },
        vocabulary=vocabulary,
        alpha=payload["alpha"],
    )
