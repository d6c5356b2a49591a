"""Chi-square descriptor selection with signed indicators.

For each descriptor the 2x2 observed table is tested for independence from
the class. Significant descriptors (statistic above the df=1 critical value
3.84, p <= 0.05) enter the indicator profile with sign +1 when the
descriptor is relatively more frequent in the genetic class, -1 when less.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Mapping

from .contingency import ContingencyTable, FrequencyProfile, expected, table_for
from .errors import DegenerateTableError

__all__ = [
    "CRITICAL_VALUE_P05",
    "Indicator",
    "ChiSquareResult",
    "IndicatorProfile",
    "chi_square",
    "indicator_of",
    "evaluate_table",
    "build_indicator_profile",
    "pvalue_chisq_df1",
    "save_indicator_profile",
    "load_indicator_profile",
]

# df=1 critical value at p <= 0.05; significance is strict inequality on the
# statistic, never a recomputed p-value, so results do not depend on p-value
# precision.
CRITICAL_VALUE_P05 = 3.84

# Minimum expected cell value below which the continuity correction kicks in.
_YATES_EXPECTED_FLOOR = 5.0


class Indicator(Enum):
    POSITIVE = 1
    NEGATIVE = -1
    NEUTRAL = 0


@dataclass(frozen=True, slots=True)
class ChiSquareResult:
    statistic: float
    yates_applied: bool
    significant: bool
    indicator: Indicator


def chi_square(table: ContingencyTable) -> tuple[float, bool]:
    """Chi-square statistic of a 2x2 table; returns (statistic, yates_applied).

    The continuity correction replaces each |o - e| with |o - e| - 0.5 when
    any expected cell falls below 5; the corrected deviation is clamped at 0
    so a deviation under 0.5 cannot inflate the statistic.

    Cells are summed row by row, which makes the result bit-identical under
    a column swap (addition of two terms commutes exactly).
    """
    exp = expected(table)
    observed = (table.o11, table.o12, table.o21, table.o22)
    cells = exp.cells()
    yates = any(e < _YATES_EXPECTED_FLOOR for e in cells)
    if yates:
        terms = [max(abs(o - e) - 0.5, 0.0) ** 2 / e for o, e in zip(observed, cells)]
    else:
        terms = [(o - e) ** 2 / e for o, e in zip(observed, cells)]
    statistic = (terms[0] + terms[1]) + (terms[2] + terms[3])
    return statistic, yates


def indicator_of(table: ContingencyTable) -> Indicator:
    """Sign of the association: POSITIVE when the descriptor's relative
    frequency o11/c1 in the genetic class exceeds o12/c2 in the nongenetic.

    Compared as integer cross-products, so exact ties are exact.
    """
    if table.c1 == 0 or table.c2 == 0:
        raise DegenerateTableError("indicator undefined for an empty class")
    lhs = table.o11 * table.c2
    rhs = table.o12 * table.c1
    if lhs > rhs:
        return Indicator.POSITIVE
    if lhs < rhs:
        return Indicator.NEGATIVE
    return Indicator.NEUTRAL


def evaluate_table(
    table: ContingencyTable, critical_value: float = CRITICAL_VALUE_P05
) -> ChiSquareResult:
    """Full test of one table: statistic, significance, signed indicator.

    The indicator is NEUTRAL whenever the statistic is not significant or the
    relative frequencies tie exactly.
    """
    statistic, yates = chi_square(table)
    significant = statistic > critical_value
    indicator = indicator_of(table) if significant else Indicator.NEUTRAL
    return ChiSquareResult(
        statistic=statistic,
        yates_applied=yates,
        significant=significant,
        indicator=indicator,
    )


def pvalue_chisq_df1(statistic: float) -> float:
    """Upper-tail probability of the chi-square distribution with df = 1."""
    if statistic < 0:
        raise ValueError(f"chi-square statistic must be >= 0, got {statistic}")
    return math.erfc(math.sqrt(statistic / 2.0))


@dataclass(frozen=True, slots=True)
class IndicatorProfile:
    """The trained model: descriptor -> signed indicator, with provenance.

    Contains exactly the descriptors that tested significant with a
    non-neutral direction. ``statistics`` and ``yates_flags`` keep the test
    evidence per retained descriptor for reporting and persistence.
    """

    signs: Mapping[str, int]
    genetic_total: int
    nongenetic_total: int
    critical_value: float = CRITICAL_VALUE_P05
    statistics: Mapping[str, float] = field(default_factory=dict)
    yates_flags: Mapping[str, bool] = field(default_factory=dict)
    neutral_significant: int = 0
    degenerate_skipped: int = 0

    @property
    def positive_count(self) -> int:
        return sum(1 for s in self.signs.values() if s > 0)

    @property
    def negative_count(self) -> int:
        return sum(1 for s in self.signs.values() if s < 0)

    @property
    def significant_count(self) -> int:
        """All significant descriptors, including exact ties that were dropped."""
        return len(self.signs) + self.neutral_significant


def build_indicator_profile(
    profile: FrequencyProfile,
    exclusion: frozenset[str] | set[str] = frozenset(),
    critical_value: float = CRITICAL_VALUE_P05,
) -> IndicatorProfile:
    """Test every non-excluded descriptor in the profile and keep the signed
    significant ones.

    Descriptors with a degenerate table (present in every citation of both
    classes) are skipped and counted. Output ordering is canonical (sorted by
    descriptor name), independent of evaluation order.
    """
    signs: dict[str, int] = {}
    statistics: dict[str, float] = {}
    yates_flags: dict[str, bool] = {}
    neutral_significant = 0
    degenerate = 0
    for descriptor in profile.descriptors():
        if descriptor in exclusion:
            continue
        table = table_for(profile, descriptor)
        try:
            result = evaluate_table(table, critical_value)
        except DegenerateTableError:
            degenerate += 1
            continue
        if not result.significant:
            continue
        if result.indicator is Indicator.NEUTRAL:
            neutral_significant += 1
            continue
        signs[descriptor] = result.indicator.value
        statistics[descriptor] = result.statistic
        yates_flags[descriptor] = result.yates_applied
    return IndicatorProfile(
        signs=signs,
        genetic_total=profile.genetic_total,
        nongenetic_total=profile.nongenetic_total,
        critical_value=critical_value,
        statistics=statistics,
        yates_flags=yates_flags,
        neutral_significant=neutral_significant,
        degenerate_skipped=degenerate,
    )


# --------------------------------------------------------------------------
# Persistence: sorted CSV with metadata header
# --------------------------------------------------------------------------

_INDICATOR_MAGIC = "#litriage indicator profile v1"


def save_indicator_profile(profile: IndicatorProfile, dest: str | Path | IO) -> None:
    from . import __version__

    stream, owned = (
        (open(dest, "w", encoding="utf-8", newline=""), True)
        if isinstance(dest, (str, Path))
        else (dest, False)
    )
    try:
        stream.write(_INDICATOR_MAGIC + "\n")
        stream.write(f"#toolkit_version,{__version__}\n")
        stream.write(f"#genetic_total,{profile.genetic_total}\n")
        stream.write(f"#nongenetic_total,{profile.nongenetic_total}\n")
        stream.write(f"#critical_value,{profile.critical_value!r}\n")
        stream.write(f"#neutral_significant,{profile.neutral_significant}\n")
        stream.write(f"#degenerate_skipped,{profile.degenerate_skipped}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["descriptor", "sign", "chi_square", "yates_applied"])
        for descriptor in sorted(profile.signs):
            writer.writerow(
                [
                    descriptor,
                    "%+d" % profile.signs[descriptor],
                    repr(profile.statistics.get(descriptor, 0.0)),
                    "true" if profile.yates_flags.get(descriptor, False) else "false",
                ]
            )
    finally:
        if owned:
            stream.close()


def load_indicator_profile(source: str | Path | IO) -> IndicatorProfile:
    stream, owned = (
        (open(source, "r", encoding="utf-8", newline=""), True)
        if isinstance(source, (str, Path))
        else (source, False)
    )
    try:
        meta: dict[str, str] = {}
        signs: dict[str, int] = {}
        statistics: dict[str, float] = {}
        yates_flags: dict[str, bool] = {}
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
                header_seen = True
                continue
            descriptor, sign, statistic, yates = row
            signs[descriptor] = int(sign)
            statistics[descriptor] = float(statistic)
            yates_flags[descriptor] = yates == "true"
        return IndicatorProfile(
            signs=signs,
            genetic_total=int(meta["genetic_total"]),
            nongenetic_total=int(meta["nongenetic_total"]),
            critical_value=float(meta["critical_value"]),
            statistics=statistics,
            yates_flags=yates_flags,
            neutral_significant=int(meta.get("neutral_significant", 0)),
            degenerate_skipped=int(meta.get("degenerate_skipped", 0)),
        )
    except (KeyError, IndexError, ValueError) as exc:
        raise ValueError(f"not an indicator profile file: {exc}") from exc
    finally:
        if owned:
            stream.close()
