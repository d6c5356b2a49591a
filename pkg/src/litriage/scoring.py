"""Citation scoring against an indicator profile, and threshold classification.

A citation's decision score is the sum of indicator signs over its
descriptors: +1 per positive indicator, -1 per negative, 0 for anything the
profile does not know (including everything on the exclusion list, which by
construction never enters a profile).
"""

from __future__ import annotations

import csv
import itertools
from collections import Counter
from concurrent.futures import Future, ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

from .chisq import IndicatorProfile
from .corpus import Citation, DomainLabel

__all__ = [
    "Threshold",
    "ScoreReport",
    "score_citation",
    "score_corpus",
    "classify",
    "save_scores",
    "save_histogram",
]


@dataclass(frozen=True, slots=True)
class Threshold:
    """Decision score threshold: score >= theta classifies as GENETIC."""

    theta: int


def classify(score: int, theta: int) -> DomainLabel:
    return DomainLabel.GENETIC if score >= theta else DomainLabel.NONGENETIC


def score_citation(citation: Citation, profile: IndicatorProfile) -> int:
    get = profile.signs.get
    return sum(get(d, 0) for d in citation.descriptors)


@dataclass(frozen=True, slots=True)
class ScoreReport:
    """Per-citation integer scores plus the score histogram."""

    scores: dict[str, int]
    histogram: dict[int, int]

    @property
    def total(self) -> int:
        return len(self.scores)


# Shared state for pool workers; set once per worker by the initializer so
# the sign table is not re-pickled with every chunk.
_worker_signs: Mapping[str, int] | None = None


def _init_scoring_worker(signs: Mapping[str, int]) -> None:
    global _worker_signs
    _worker_signs = signs


def _score_chunk(chunk: Sequence[Citation]) -> list[tuple[str, int]]:
    assert _worker_signs is not None
    get = _worker_signs.get
    return [(c.id, sum(get(d, 0) for d in c.descriptors)) for c in chunk]


def _chunks(citations: Iterable[Citation], size: int) -> Iterator[list[Citation]]:
    chunk: list[Citation] = []
    for citation in citations:
        chunk.append(citation)
        if len(chunk) >= size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def score_corpus(
    citations: Iterable[Citation],
    profile: IndicatorProfile,
    *,
    workers: int = 1,
    chunk_size: int = 10_000,
) -> ScoreReport:
    """Score every citation; single pass, linear in total descriptor count.

    With ``workers`` > 1 the corpus is scored in fixed-size chunks on a
    process pool and merged back in corpus order, so the result is identical
    for any worker count.
    """
    scores: dict[str, int] = {}
    histogram: Counter[int] = Counter()

    def serial(batch: Iterable[Citation]) -> None:
        get = profile.signs.get
        for citation in batch:
            s = sum(get(d, 0) for d in citation.descriptors)
            scores[citation.id] = s
            histogram[s] += 1

    if workers <= 1:
        serial(citations)
        return ScoreReport(scores=scores, histogram=dict(histogram))

    chunks = _chunks(citations, chunk_size)
    first = next(chunks, None)
    second = next(chunks, None) if first is not None else None
    if second is None:
        # At most one chunk: a pool would only add overhead.
        serial(first or [])
        return ScoreReport(scores=scores, histogram=dict(histogram))

    def merge(result: list[tuple[str, int]]) -> None:
        for cid, s in result:
            scores[cid] = s
            histogram[s] += 1

    pending: list[Future] = []
    with ProcessPoolExecutor(
        max_workers=workers,
        initializer=_init_scoring_worker,
        initargs=(dict(profile.signs),),
    ) as pool:
        for chunk in itertools.chain([first, second], chunks):
            pending.append(pool.submit(_score_chunk, chunk))
            # Bounded submission window keeps memory flat on huge corpora
            # while preserving corpus order in the merge.
            if len(pending) >= workers * 2:
                merge(pending.pop(0).result())
        for future in pending:
            merge(future.result())
    return ScoreReport(scores=scores, histogram=dict(histogram))


# --------------------------------------------------------------------------
# CSV emission
# --------------------------------------------------------------------------


def save_scores(report: ScoreReport, theta: int, dest: str | Path | IO) -> None:
    """Write `id,score,label` rows in corpus order, labeled at ``theta``."""
    stream, owned = (
        (open(dest, "w", encoding="utf-8", newline=""), True)
        if isinstance(dest, (str, Path))
        else (dest, False)
    )
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["id", "score", "label"])
        for cid, score in report.scores.items():
            writer.writerow([cid, score, classify(score, theta).value])
    finally:
        if owned:
            stream.close()


def save_histogram(report: ScoreReport, dest: str | Path | IO) -> None:
    """Write `score,count` rows sorted by score (score-distribution data)."""
    stream, owned = (
        (open(dest, "w", encoding="utf-8", newline=""), True)
        if isinstance(dest, (str, Path))
        else (dest, False)
    )
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["score", "count"])
        for score in sorted(report.histogram):
            writer.writerow([score, report.histogram[score]])
    finally:
        if owned:
            stream.close()
