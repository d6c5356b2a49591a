"""Bag-of-words pipeline: tokenize, stopword-filter, stem, prune, TF-IDF.

Feature extraction for the baseline classifier. Text fields go through
lowercasing word tokenization, stopword removal, and stemming; descriptor
mode instead treats each full descriptor string as a single opaque token.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import IO, Callable, Iterable, Mapping, Sequence

from ..corpus import Citation
from . import lovins

__all__ = [
    "FIELD_CHOICES",
    "PipelineConfig",
    "Vocabulary",
    "VectorizeResult",
    "tokenize",
    "remove_stopwords",
    "get_stemmer",
    "register_stemmer",
    "load_stopwords",
    "default_stopwords",
    "citation_tokens",
    "build_vocabulary",
    "count_vector",
    "vectorize_tfidf",
]

# Tokens are maximal alphanumeric runs; everything else separates.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

FIELD_CHOICES = ("title", "abstract", "title_abstract", "descriptors")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any non-alphanumeric character."""
    return _TOKEN_RE.findall(text.lower())


def remove_stopwords(tokens: Sequence[str], stopwords: frozenset[str] | set[str]) -> list[str]:
    return [t for t in tokens if t not in stopwords]


_STEMMERS: dict[str, Callable[[str], str]] = {
    "lovins": lovins.stem,
    "identity": lambda token: token,
}


def register_stemmer(name: str, fn: Callable[[str], str]) -> None:
    _STEMMERS[name] = fn


def get_stemmer(name: str) -> Callable[[str], str]:
    try:
        return _STEMMERS[name]
    except KeyError:
        raise ValueError(
            f"unknown stemmer {name!r}; available: {sorted(_STEMMERS)}"
        ) from None


def load_stopwords(source: str | Path | IO) -> frozenset[str]:
    """One lowercase word per line; blank lines and # comments skipped."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_stopwords(fh)
    words = set()
    for line in source:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    """The packaged SMART English stopword list."""
    text = resources.files("litriage").joinpath("data/smart_stopwords.txt").read_text("utf-8")
    return frozenset(
        line.strip() for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


@dataclass(frozen=True)
class PipelineConfig:
    """Feature extraction settings for the bag-of-words pipeline."""

    field_selector: str = "title_abstract"
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    stemmer: str = "lovins"
    min_df: int = 2

    def __post_init__(self) -> None:
        if self.field_selector not in FIELD_CHOICES:
            raise ValueError(
                f"field_selector must be one of {FIELD_CHOICES}, "
                f"got {self.field_selector!r}"
            )
        if self.min_df < 1:
            raise ValueError(f"min_df must be >= 1, got {self.min_df}")
        get_stemmer(self.stemmer)


def citation_tokens(citation: Citation, config: PipelineConfig) -> list[str]:
    """Feature tokens of one citation under the pipeline config.

    Descriptor mode passes each descriptor through verbatim as one token;
    text modes tokenize, drop stopwords, and stem.
    """
    if config.field_selector == "descriptors":
        return sorted(citation.descriptors)
    if config.field_selector == "title":
        text = citation.title
    elif config.field_selector == "abstract":
        text = citation.abstract or ""
    else:
        text = citation.title + " " + (citation.abstract or "")
    stemmer = get_stemmer(config.stemmer)
    return [stemmer(t) for t in remove_stopwords(tokenize(text), config.stopwords)]


@dataclass(frozen=True, slots=True)
class Vocabulary:
    """Term -> dense column index and document frequency, after min-df pruning.

    Indices follow sorted term order, so the vocabulary is canonical no
    matter how the documents were ordered.
    """

    index: dict[str, int]
    df: dict[str, int]
    n_docs: int

    def __len__(self) -> int:
        return len(self.index)

    def terms(self) -> list[str]:
        return sorted(self.index, key=self.index.__getitem__)


def build_vocabulary(
    token_lists: Iterable[Sequence[str]], min_df: int = 2
) -> Vocabulary:
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")
    df: dict[str, int] = {}
    n_docs = 0
    for tokens in token_lists:
        n_docs += 1
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    kept = sorted(t for t, count in df.items() if count >= min_df)
    return Vocabulary(
        index={t: i for i, t in enumerate(kept)},
        df={t: df[t] for t in kept},
        n_docs=n_docs,
    )


def count_vector(tokens: Sequence[str], vocabulary: Vocabulary) -> dict[int, int]:
    """Raw term counts of in-vocabulary tokens, keyed by column index."""
    counts: dict[int, int] = {}
    index = vocabulary.index
    for token in tokens:
        col = index.get(token)
        if col is not None:
            counts[col] = counts.get(col, 0) + 1
    return counts


@dataclass(frozen=True, slots=True)
class VectorizeResult:
    vectors: list[dict[int, float]]
    empty_docs: tuple[int, ...]


def vectorize_tfidf(
    token_lists: Iterable[Sequence[str]], vocabulary: Vocabulary
) -> VectorizeResult:
    """TF-IDF document vectors scaled to unit Euclidean length.

    weight(t, d) = tf(t, d) * ln(N / df(t)) over the vocabulary's collection
    stats; a term in every document weighs exactly 0. Documents with no
    weight anywhere stay zero vectors and are flagged, not normalized.
    """
    idf = {
        vocabulary.index[t]: math.log(vocabulary.n_docs / df_t)
        for t, df_t in vocabulary.df.items()
    }
    vectors: list[dict[int, float]] = []
    empty: list[int] = []
    for doc_index, tokens in enumerate(token_lists):
        weights = {
            col: tf * idf[col]
            for col, tf in count_vector(tokens, vocabulary).items()
            if idf[col] != 0.0
        }
        norm = math.sqrt(sum(w * w for w in weights.values()))
        if norm == 0.0:
            empty.append(doc_index)
            vectors.append({})
            continue
        vectors.append({col: w / norm for col, w in sorted(weights.items())})
    return VectorizeResult(vectors=vectors, empty_docs=tuple(empty))
