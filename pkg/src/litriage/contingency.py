"""Per-domain descriptor frequency profiles and 2x2 contingency tables.

The counting unit is the citation: a descriptor is counted once per citation
it is assigned to, never by occurrence. Profiles are mergeable, so counting
can shard by citation range and combine the shards in any order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Mapping

from .corpus import Citation, DomainLabel
from .errors import DegenerateCorpusError, DegenerateTableError

__all__ = [
    "FrequencyProfile",
    "ContingencyTable",
    "ExpectedTable",
    "build_profile",
    "merge_profiles",
    "table_for",
    "expected",
    "save_profile",
    "load_profile",
]


@dataclass(frozen=True, slots=True)
class FrequencyProfile:
    """Citation counts per descriptor in each class, plus the class sizes."""

    genetic_counts: Mapping[str, int]
    nongenetic_counts: Mapping[str, int]
    genetic_total: int
    nongenetic_total: int

    def descriptors(self) -> list[str]:
        """All descriptors seen in either class, in sorted order."""
        return sorted(set(self.genetic_counts) | set(self.nongenetic_counts))

    def counts_for(self, descriptor: str) -> tuple[int, int]:
        return (
            self.genetic_counts.get(descriptor, 0),
            self.nongenetic_counts.get(descriptor, 0),
        )


def build_profile(
    citations: Iterable[Citation],
    exclusion: frozenset[str] | set[str] = frozenset(),
) -> FrequencyProfile:
    """Count, per class, how many citations carry each non-excluded descriptor.

    Every citation must be labeled; both classes must be non-empty, otherwise
    the chi-square statistics downstream are undefined.
    """
    genetic: dict[str, int] = {}
    nongenetic: dict[str, int] = {}
    totals = {DomainLabel.GENETIC: 0, DomainLabel.NONGENETIC: 0}
    for citation in citations:
        if citation.label is None:
            raise ValueError(f"unlabeled citation {citation.id!r}")
        totals[citation.label] += 1
        counts = genetic if citation.label is DomainLabel.GENETIC else nongenetic
        for descriptor in citation.descriptors:
            if descriptor not in exclusion:
                counts[descriptor] = counts.get(descriptor, 0) + 1
    if totals[DomainLabel.GENETIC] == 0 or totals[DomainLabel.NONGENETIC] == 0:
        raise DegenerateCorpusError(
            "degenerate corpus: both classes must contain at least one citation "
            f"(genetic={totals[DomainLabel.GENETIC]}, "
            f"nongenetic={totals[DomainLabel.NONGENETIC]})"
        )
    return FrequencyProfile(
        genetic_counts=genetic,
        nongenetic_counts=nongenetic,
        genetic_total=totals[DomainLabel.GENETIC],
        nongenetic_total=totals[DomainLabel.NONGENETIC],
    )


def merge_profiles(a: FrequencyProfile, b: FrequencyProfile) -> FrequencyProfile:
    """Cell-wise sum of two profiles built over disjoint corpora."""
    genetic = dict(a.genetic_counts)
    for d, n in b.genetic_counts.items():
        genetic[d] = genetic.get(d, 0) + n
    nongenetic = dict(a.nongenetic_counts)
    for d, n in b.nongenetic_counts.items():
        nongenetic[d] = nongenetic.get(d, 0) + n
    return FrequencyProfile(
        genetic_counts=genetic,
        nongenetic_counts=nongenetic,
        genetic_total=a.genetic_total + b.genetic_total,
        nongenetic_total=a.nongenetic_total + b.nongenetic_total,
    )


@dataclass(frozen=True, slots=True)
class ContingencyTable:
    """Observed 2x2 counts for one descriptor.

    Rows: descriptor present / absent. Columns: genetic / nongenetic class.
    """

    o11: int
    o12: int
    o21: int
    o22: int

    def __post_init__(self) -> None:
        for cell in (self.o11, self.o12, self.o21, self.o22):
            if cell < 0:
                raise ValueError("observed counts must be non-negative")

    @property
    def r1(self) -> int:
        return self.o11 + self.o12

    @property
    def r2(self) -> int:
        return self.o21 + self.o22

    @property
    def c1(self) -> int:
        return self.o11 + self.o21

    @property
    def c2(self) -> int:
        return self.o12 + self.o22

    @property
    def n(self) -> int:
        return self.o11 + self.o12 + self.o21 + self.o22

    def swap_columns(self) -> "ContingencyTable":
        """The same table with the two classes exchanged."""
        return ContingencyTable(self.o12, self.o11, self.o22, self.o21)


@dataclass(frozen=True, slots=True)
class ExpectedTable:
    """Expected 2x2 frequencies under independence; margins match observed."""

    e11: float
    e12: float
    e21: float
    e22: float

    def cells(self) -> tuple[float, float, float, float]:
        return (self.e11, self.e12, self.e21, self.e22)


def table_for(profile: FrequencyProfile, descriptor: str) -> ContingencyTable:
    """Observed table for one descriptor against the profile's two classes."""
    g, ng = profile.counts_for(descriptor)
    if g == 0 and ng == 0:
        raise KeyError(f"descriptor {descriptor!r} unknown to profile")
    return ContingencyTable(
        o11=g,
        o12=ng,
        o21=profile.genetic_total - g,
        o22=profile.nongenetic_total - ng,
    )


def expected(table: ContingencyTable) -> ExpectedTable:
    """Expected frequencies e_ij = r_i * c_j / n.

    Any zero margin makes the table degenerate and the chi-square statistic
    undefined.
    """
    r1, r2, c1, c2, n = table.r1, table.r2, table.c1, table.c2, table.n
    if n == 0 or r1 == 0 or r2 == 0 or c1 == 0 or c2 == 0:
        raise DegenerateTableError(
            f"degenerate table: margins r=({r1},{r2}) c=({c1},{c2})"
        )
    return ExpectedTable(
        e11=(r1 * c1) / n,
        e12=(r1 * c2) / n,
        e21=(r2 * c1) / n,
        e22=(r2 * c2) / n,
    )


# --------------------------------------------------------------------------
# Persistence: sorted CSV, diff-able across runs
# --------------------------------------------------------------------------

_PROFILE_MAGIC = "#litriage frequency profile v1"


def save_profile(profile: FrequencyProfile, dest: str | Path | IO) -> None:
    stream, owned = (
        (open(dest, "w", encoding="utf-8", newline=""), True)
        if isinstance(dest, (str, Path))
        else (dest, False)
    )
    try:
        stream.write(_PROFILE_MAGIC + "\n")
        stream.write(f"#genetic_total,{profile.genetic_total}\n")
        stream.write(f"#nongenetic_total,{profile.nongenetic_total}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["descriptor", "genetic_count", "nongenetic_count"])
        for descriptor in profile.descriptors():
            g, ng = profile.counts_for(descriptor)
            writer.writerow([descriptor, g, ng])
    finally:
        if owned:
            stream.close()


def load_profile(source: str | Path | IO) -> FrequencyProfile:
    stream, owned = (
        (open(source, "r", encoding="utf-8", newline=""), True)
        if isinstance(source, (str, Path))
        else (source, False)
    )
    try:
        meta: dict[str, str] = {}
        rows: list[list[str]] = []
        header_seen = False
        for line in stream:
            if line.startswith("#"):
                if "," in line:
                    key, _, value = line[1:].strip().partition(",")
                    meta[key] = value
                continue
            if not line.strip():
                continue
            row = next(csv.reader([line]))
            if not header_seen:
                header_seen = True  # column header row
                continue
            rows.append(row)
        genetic = {r[0]: int(r[1]) for r in rows if int(r[1]) > 0}
        nongenetic = {r[0]: int(r[2]) for r in rows if int(r[2]) > 0}
        return FrequencyProfile(
            genetic_counts=genetic,
            nongenetic_counts=nongenetic,
            genetic_total=int(meta["genetic_total"]),
            nongenetic_total=int(meta["nongenetic_total"]),
        )
    except (KeyError, IndexError, ValueError) as exc:
        raise ValueError(f"not a frequency profile file: {exc}") from exc
    finally:
        if owned:
            stream.close()
