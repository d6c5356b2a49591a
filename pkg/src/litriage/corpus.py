"""Corpus ingestion: parse, label, filter, and fold-split citation corpora.

Three input formats are supported: a MEDLINE-subset XML reader, a canonical
JSONL interchange format, and a relational TSV format (one id<TAB>descriptor
pair per row). JSONL is the canonical hand-off between pipeline stages.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence
from xml.parsers import expat

from .errors import CorpusFormatError

__all__ = [
    "DomainLabel",
    "Citation",
    "FoldAssignment",
    "ParseIssue",
    "parse_medline_xml",
    "parse_jsonl",
    "parse_tsv",
    "write_jsonl",
    "citation_to_dict",
    "citation_from_dict",
    "read_reference_list",
    "read_exclusion_list",
    "default_check_tags",
    "label_by_reference",
    "apply_exclusion",
    "split_folds",
]


class DomainLabel(Enum):
    """Two-class domain label. GENETIC is the positive class throughout."""

    GENETIC = "genetic"
    NONGENETIC = "nongenetic"

    @classmethod
    def from_string(cls, value: str) -> "DomainLabel":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown label {value!r}; expected 'genetic' or 'nongenetic'"
            ) from None


@dataclass(frozen=True, slots=True)
class Citation:
    """One document: opaque id, text fields, and its descriptor set.

    ``descriptors`` has set semantics: a descriptor is either assigned to the
    citation or not, never counted twice.
    """

    id: str
    title: str = ""
    abstract: str | None = None
    descriptors: frozenset[str] = field(default_factory=frozenset)
    label: DomainLabel | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("citation id must be non-empty")
        if not isinstance(self.descriptors, frozenset):
            object.__setattr__(self, "descriptors", frozenset(self.descriptors))


@dataclass(frozen=True, slots=True)
class ParseIssue:
    """One skipped record in skip-and-report parsing mode."""

    record: int
    message: str
    line: int | None = None
    byte_offset: int | None = None


# --------------------------------------------------------------------------
# MEDLINE-subset XML
# --------------------------------------------------------------------------

_XML_CHUNK = 64 * 1024

# Element subset recognized by the reader. Anything else is ignored, so the
# full distribution DTD parses without being modeled.
_TAG_RECORD = "MedlineCitation"
_TAG_ID = "PMID"
_TAG_TITLE = "ArticleTitle"
_TAG_ABSTRACT = "AbstractText"
_TAG_DESCRIPTOR = "DescriptorName"


class _RecordBuilder:
    """Expat handler state for one pass over a citation stream."""

    def __init__(self) -> None:
        self.done: list[tuple[str | None, str, str | None, list[str]]] = []
        self.in_record = False
        self.record_index = -1
        self._id: str | None = None
        self._title: list[str] = []
        self._abstract: list[str] | None = None
        self._descriptors: list[str] = []
        self._capture: list[str] | None = None

    def start(self, name: str, attrs: dict[str, str]) -> None:
        if name == _TAG_RECORD:
            self.in_record = True
            self.record_index += 1
            self._id = None
            self._title = []
            self._abstract = None
            self._descriptors = []
            return
        if not self.in_record:
            return
        if name == _TAG_ID and self._id is None:
            self._capture = []
        elif name == _TAG_TITLE:
            self._capture = self._title
        elif name == _TAG_ABSTRACT:
            if self._abstract is None:
                self._abstract = []
            else:
                self._abstract.append(" ")
            self._capture = self._abstract
        elif name == _TAG_DESCRIPTOR:
            self._capture = []

    def end(self, name: str) -> None:
        if name == _TAG_ID and self._capture is not None and self._id is None:
            self._id = "".join(self._capture).strip()
        elif name == _TAG_DESCRIPTOR and self._capture is not None:
            descriptor = "".join(self._capture).strip()
            if descriptor:
                self._descriptors.append(descriptor)
        elif name == _TAG_RECORD and self.in_record:
            title = "".join(self._title).strip()
            abstract = None
            if self._abstract is not None:
                abstract = "".join(self._abstract).strip()
            self.done.append((self._id, title, abstract, self._descriptors))
            self.in_record = False
        self._capture = None

    def chars(self, data: str) -> None:
        if self._capture is not None:
            self._capture.append(data)


def _open_binary(source: str | Path | IO[bytes]) -> tuple[IO[bytes], bool]:
    if isinstance(source, (str, Path)):
        return open(source, "rb"), True
    return source, False


def parse_medline_xml(
    source: str | Path | IO[bytes],
    *,
    skip_bad_records: bool = False,
    issues: list[ParseIssue] | None = None,
) -> Iterator[Citation]:
    """Stream citations out of MEDLINE-subset XML.

    Memory use is constant per record: elements outside the recognized subset
    are ignored and records are released as soon as they are yielded.

    Malformed XML raises :class:`CorpusFormatError` carrying the byte offset.
    A record without an id is an error in fail-fast mode (the default); with
    ``skip_bad_records`` it is dropped and, when ``issues`` is given,
    reported there.
    """
    stream, owned = _open_binary(source)
    builder = _RecordBuilder()
    parser = expat.ParserCreate()
    parser.buffer_text = True
    parser.StartElementHandler = builder.start
    parser.EndElementHandler = builder.end
    parser.CharacterDataHandler = builder.chars

    def drain() -> Iterator[Citation]:
        for cid, title, abstract, descriptors in builder.done:
            if not cid:
                issue = ParseIssue(
                    record=builder.record_index,
                    message="record missing id",
                    line=parser.CurrentLineNumber,
                    byte_offset=parser.CurrentByteIndex,
                )
                if not skip_bad_records:
                    raise CorpusFormatError(
                        issue.message, line=issue.line, byte_offset=issue.byte_offset
                    )
                if issues is not None:
                    issues.append(issue)
                continue
            yield Citation(
                id=cid,
                title=title,
                abstract=abstract,
                descriptors=frozenset(descriptors),
            )
        builder.done.clear()

    try:
        while True:
            chunk = stream.read(_XML_CHUNK)
            try:
                parser.Parse(chunk, not chunk)
            except expat.ExpatError as exc:
                raise CorpusFormatError(
                    f"malformed XML: {expat.errors.messages[exc.code]}",
                    line=exc.lineno,
                    byte_offset=parser.ErrorByteIndex,
                ) from exc
            yield from drain()
            if not chunk:
                break
    finally:
        if owned:
            stream.close()


# --------------------------------------------------------------------------
# JSONL (canonical interchange format)
# --------------------------------------------------------------------------


def citation_to_dict(citation: Citation) -> dict:
    out: dict = {"id": citation.id, "title": citation.title}
    if citation.abstract is not None:
        out["abstract"] = citation.abstract
    out["descriptors"] = sorted(citation.descriptors)
    if citation.label is not None:
        out["label"] = citation.label.value
    return out


def citation_from_dict(record: dict, *, where: str = "record") -> Citation:
    if not isinstance(record, dict):
        raise CorpusFormatError(f"{where}: not a JSON object")
    raw_id = record.get("id")
    if raw_id is None or raw_id == "":
        raise CorpusFormatError(f"{where}: missing id")
    descriptors = record.get("descriptors", [])
    if not isinstance(descriptors, (list, tuple)):
        raise CorpusFormatError(f"{where}: descriptors must be an array")
    label = None
    if record.get("label") is not None:
        try:
            label = DomainLabel.from_string(str(record["label"]))
        except ValueError as exc:
            raise CorpusFormatError(f"{where}: {exc}") from None
    abstract = record.get("abstract")
    return Citation(
        id=str(raw_id),
        title=str(record.get("title", "")),
        abstract=None if abstract is None else str(abstract),
        descriptors=frozenset(str(d) for d in descriptors),
        label=label,
    )


def _open_text(source: str | Path | IO) -> tuple[IO, bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8"), True
    return source, False


def parse_jsonl(
    source: str | Path | IO,
    *,
    skip_bad_records: bool = False,
    issues: list[ParseIssue] | None = None,
) -> Iterator[Citation]:
    """Parse the canonical one-object-per-line citation format.

    Errors name the offending line number; blank lines are ignored.
    """
    stream, owned = _open_text(source)
    try:
        for lineno, line in enumerate(stream, start=1):
            if isinstance(line, bytes):
                line = line.decode("utf-8")
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                citation = citation_from_dict(record, where=f"line {lineno}")
            except (json.JSONDecodeError, CorpusFormatError) as exc:
                message = (
                    str(exc)
                    if isinstance(exc, CorpusFormatError)
                    else f"line {lineno}: invalid JSON ({exc.msg})"
                )
                if not skip_bad_records:
                    raise CorpusFormatError(message, line=lineno) from None
                if issues is not None:
                    issues.append(
                        ParseIssue(record=lineno - 1, message=message, line=lineno)
                    )
                continue
            yield citation
    finally:
        if owned:
            stream.close()


def write_jsonl(citations: Iterable[Citation], dest: str | Path | IO) -> int:
    """Write citations in the canonical JSONL format; returns the row count."""
    stream, owned = (
        (open(dest, "w", encoding="utf-8"), True)
        if isinstance(dest, (str, Path))
        else (dest, False)
    )
    count = 0
    try:
        for citation in citations:
            stream.write(json.dumps(citation_to_dict(citation), ensure_ascii=False))
            stream.write("\n")
            count += 1
    finally:
        if owned:
            stream.close()
    return count


# --------------------------------------------------------------------------
# Relational TSV (id <TAB> descriptor, one row per pair)
# --------------------------------------------------------------------------


def parse_tsv(
    source: str | Path | IO,
    *,
    skip_bad_records: bool = False,
    issues: list[ParseIssue] | None = None,
) -> Iterator[Citation]:
    """Parse id<TAB>descriptor rows into citations, in first-seen order.

    Titles and abstracts do not exist in this format; titles come back empty
    and abstracts absent.
    """
    stream, owned = _open_text(source)
    order: list[str] = []
    descriptors: dict[str, set[str]] = {}
    try:
        for lineno, line in enumerate(stream, start=1):
            if isinstance(line, bytes):
                line = line.decode("utf-8")
            row = line.rstrip("\n").rstrip("\r")
            if not row.strip():
                continue
            parts = row.split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                message = f"line {lineno}: expected id<TAB>descriptor"
                if not skip_bad_records:
                    raise CorpusFormatError(message, line=lineno)
                if issues is not None:
                    issues.append(
                        ParseIssue(record=lineno - 1, message=message, line=lineno)
                    )
                continue
            cid, descriptor = parts[0].strip(), parts[1].strip()
            if cid not in descriptors:
                order.append(cid)
                descriptors[cid] = set()
            descriptors[cid].add(descriptor)
    finally:
        if owned:
            stream.close()
    for cid in order:
        yield Citation(id=cid, descriptors=frozenset(descriptors[cid]))


# --------------------------------------------------------------------------
# Reference and exclusion lists
# --------------------------------------------------------------------------


def read_reference_list(source: str | Path | IO, *, column: int = 0) -> frozenset[str]:
    """Read a reference list of citation ids, one record per line.

    ``column`` picks a whitespace-separated field for multi-column files
    (e.g. gene-to-citation link tables). Lines starting with ``#`` and blank
    lines are skipped. Duplicate ids collapse; set semantics.
    """
    stream, owned = _open_text(source)
    ids: set[str] = set()
    try:
        for lineno, line in enumerate(stream, start=1):
            if isinstance(line, bytes):
                line = line.decode("utf-8")
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split()
            if column >= len(fields):
                raise CorpusFormatError(
                    f"line {lineno}: no column {column} in {len(fields)}-column row",
                    line=lineno,
                )
            ids.add(fields[column])
    finally:
        if owned:
            stream.close()
    return frozenset(ids)


def read_exclusion_list(source: str | Path | IO) -> frozenset[str]:
    """Read an exclusion list, one descriptor per line, whitespace-trimmed."""
    stream, owned = _open_text(source)
    try:
        out = set()
        for line in stream:
            if isinstance(line, bytes):
                line = line.decode("utf-8")
            name = line.strip()
            if name and not name.startswith("#"):
                out.add(name)
        return frozenset(out)
    finally:
        if owned:
            stream.close()


def default_check_tags() -> frozenset[str]:
    """The packaged default exclusion list of routine high-frequency tags."""
    text = resources.files("litriage").joinpath("data/check_tags.txt").read_text("utf-8")
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


# --------------------------------------------------------------------------
# Labeling, filtering, folds
# --------------------------------------------------------------------------


def label_by_reference(
    citations: Iterable[Citation], reference_ids: frozenset[str] | set[str]
) -> list[Citation]:
    """Label each citation GENETIC iff its id is on the reference list.

    Reference ids absent from the corpus are ignored; an empty reference list
    labels everything NONGENETIC.
    """
    return [
        replace(
            c,
            label=DomainLabel.GENETIC if c.id in reference_ids else DomainLabel.NONGENETIC,
        )
        for c in citations
    ]


def apply_exclusion(citation: Citation, exclusion: frozenset[str] | set[str]) -> Citation:
    """Drop excluded descriptors from one citation; other fields unchanged."""
    kept = citation.descriptors - exclusion
    if kept == citation.descriptors:
        return citation
    return replace(citation, descriptors=kept)


@dataclass(frozen=True, slots=True)
class FoldAssignment:
    """Citation id -> fold index in [0, k). Fold sizes differ by at most 1."""

    k: int
    assignment: dict[str, int]

    def fold_of(self, citation_id: str) -> int:
        return self.assignment[citation_id]

    def ids_in_fold(self, fold: int) -> frozenset[str]:
        return frozenset(i for i, f in self.assignment.items() if f == fold)

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for f in self.assignment.values():
            counts[f] += 1
        return counts


def split_folds(citations: Sequence[Citation], k: int, seed: int) -> FoldAssignment:
    """Assign citations to k folds: seeded shuffle, then round-robin.

    Deterministic for a given (citations, k, seed); uniform random at the
    citation level, no stratification.
    """
    if k < 2:
        raise ValueError(f"fold count must be >= 2, got {k}")
    ids = [c.id for c in citations]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate citation ids in corpus")
    if k > len(ids):
        raise ValueError(f"fold count {k} exceeds corpus size {len(ids)}")
    rng = random.Random(seed)
    rng.shuffle(ids)
    return FoldAssignment(k=k, assignment={cid: i % k for i, cid in enumerate(ids)})
