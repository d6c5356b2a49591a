import io
import random

import pytest

from litriage.contingency import (
    ContingencyTable,
    FrequencyProfile,
    build_profile,
    expected,
    load_profile,
    merge_profiles,
    save_profile,
    table_for,
)
from litriage.corpus import Citation, DomainLabel
from litriage.errors import DegenerateCorpusError, DegenerateTableError


def cite(i, label, *descriptors):
    return Citation(id=str(i), descriptors=frozenset(descriptors), label=label)


GEN = DomainLabel.GENETIC
NON = DomainLabel.NONGENETIC


class TestBuildProfile:
    def test_counts_citations_not_occurrences(self):
        profile = build_profile([cite(1, GEN, "d"), cite(2, GEN, "d"), cite(3, NON)])
        assert profile.genetic_counts["d"] == 2
        assert profile.genetic_total == 2

    def test_descriptor_absent_from_a_class(self):
        profile = build_profile([cite(1, GEN, "x"), cite(2, NON, "d")])
        assert profile.counts_for("d") == (0, 1)

    def test_hand_counted_fixture(self):
        # 3 genetic + 5 nongenetic; d on 2 genetic and 1 nongenetic.
        citations = [
            cite(1, GEN, "d", "a"),
            cite(2, GEN, "d"),
            cite(3, GEN, "a"),
            cite(4, NON, "d"),
            cite(5, NON, "b"),
            cite(6, NON),
            cite(7, NON, "b"),
            cite(8, NON, "a"),
        ]
        profile = build_profile(citations)
        assert profile.counts_for("d") == (2, 1)
        assert (profile.genetic_total, profile.nongenetic_total) == (3, 5)

    def test_exclusion_filters_counts(self):
        profile = build_profile(
            [cite(1, GEN, "Humans", "d"), cite(2, NON, "Humans")],
            exclusion=frozenset({"Humans"}),
        )
        assert "Humans" not in profile.genetic_counts
        assert "Humans" not in profile.nongenetic_counts
        assert profile.genetic_total == 1  # class sizes unaffected by exclusion

    def test_degenerate_corpus(self):
        with pytest.raises(DegenerateCorpusError, match="degenerate corpus"):
            build_profile([cite(1, GEN, "d")])

    def test_unlabeled_citation(self):
        with pytest.raises(ValueError, match="unlabeled"):
            build_profile([Citation(id="1")])

    def test_merge_equals_concatenation(self):
        rng = random.Random(5)
        pool = [f"D{i}" for i in range(12)]

        def random_corpus(start, n):
            return [
                cite(
                    start + i,
                    GEN if rng.random() < 0.5 else NON,
                    *rng.sample(pool, rng.randrange(1, 6)),
                )
                for i in range(n)
            ]

        for _ in range(20):
            a = random_corpus(0, rng.randrange(2, 30))
            b = random_corpus(1000, rng.randrange(2, 30))
            try:
                merged = merge_profiles(build_profile(a), build_profile(b))
                whole = build_profile(a + b)
            except DegenerateCorpusError:
                continue
            assert merged == whole

    def test_merge_is_order_independent(self):
        a = build_profile([cite(1, GEN, "x"), cite(2, NON, "y")])
        b = build_profile([cite(3, GEN, "y"), cite(4, NON, "x")])
        assert merge_profiles(a, b) == merge_profiles(b, a)


class TestTableFor:
    def test_arithmetic_from_profile(self):
        profile = FrequencyProfile(
            genetic_counts={"d": 2},
            nongenetic_counts={"d": 1},
            genetic_total=3,
            nongenetic_total=5,
        )
        t = table_for(profile, "d")
        assert (t.o11, t.o12, t.o21, t.o22) == (2, 1, 1, 4)
        assert t.n == 8

    def test_descriptor_everywhere_gives_zero_bottom_row(self):
        profile = FrequencyProfile(
            genetic_counts={"d": 3},
            nongenetic_counts={"d": 5},
            genetic_total=3,
            nongenetic_total=5,
        )
        t = table_for(profile, "d")
        assert (t.o21, t.o22) == (0, 0)

    def test_zero_count_in_one_class_is_valid(self):
        profile = FrequencyProfile(
            genetic_counts={},
            nongenetic_counts={"d": 4},
            genetic_total=3,
            nongenetic_total=5,
        )
        t = table_for(profile, "d")
        assert t.o11 == 0
        assert t.r1 == 4

    def test_unknown_descriptor(self):
        profile = FrequencyProfile(
            genetic_counts={}, nongenetic_counts={}, genetic_total=1, nongenetic_total=1
        )
        with pytest.raises(KeyError):
            table_for(profile, "nope")

    def test_margins_match_profile_totals(self):
        rng = random.Random(9)
        for _ in range(50):
            g_total, n_total = rng.randrange(1, 40), rng.randrange(1, 40)
            g = rng.randrange(0, g_total + 1)
            n = rng.randrange(0, n_total + 1)
            if g == 0 and n == 0:
                continue
            profile = FrequencyProfile(
                genetic_counts={"d": g} if g else {},
                nongenetic_counts={"d": n} if n else {},
                genetic_total=g_total,
                nongenetic_total=n_total,
            )
            t = table_for(profile, "d")
            assert t.c1 == g_total
            assert t.c2 == n_total


class TestExpected:
    def test_hand_computed_cell(self):
        e = expected(ContingencyTable(30, 10, 70, 190))
        assert e.e11 == pytest.approx(40 * 100 / 300, abs=1e-12)
        assert e.e11 == pytest.approx(13.3333333333, abs=1e-6)

    def test_proportional_table_matches_observed(self):
        t = ContingencyTable(10, 20, 20, 40)
        e = expected(t)
        assert e.cells() == (10.0, 20.0, 20.0, 40.0)

    def test_zero_margin_rejected(self):
        with pytest.raises(DegenerateTableError, match="degenerate table"):
            expected(ContingencyTable(0, 0, 5, 5))

    def test_margins_preserved_randomized(self):
        rng = random.Random(2)
        for _ in range(300):
            t = ContingencyTable(*(rng.randrange(1, 10**6) for _ in range(4)))
            e = expected(t)
            assert e.e11 + e.e12 == pytest.approx(t.r1, rel=1e-9)
            assert e.e21 + e.e22 == pytest.approx(t.r2, rel=1e-9)
            assert e.e11 + e.e21 == pytest.approx(t.c1, rel=1e-9)
            assert e.e12 + e.e22 == pytest.approx(t.c2, rel=1e-9)

    def test_deviations_equal_across_cells(self):
        # |o - e| is the same in all four cells of a 2x2 table.
        rng = random.Random(3)
        for _ in range(300):
            t = ContingencyTable(*(rng.randrange(1, 1000) for _ in range(4)))
            e = expected(t)
            deviations = [
                abs(o - ev)
                for o, ev in zip((t.o11, t.o12, t.o21, t.o22), e.cells())
            ]
            for d in deviations[1:]:
                assert d == pytest.approx(deviations[0], rel=1e-9, abs=1e-9)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            ContingencyTable(-1, 2, 3, 4)


class TestProfilePersistence:
    def test_round_trip(self):
        profile = build_profile(
            [
                cite(1, GEN, "Alpha, Beta", "Gamma"),
                cite(2, NON, "Gamma"),
                cite(3, NON, "Delta"),
            ]
        )
        buffer = io.StringIO()
        save_profile(profile, buffer)
        buffer.seek(0)
        assert load_profile(buffer) == profile

    def test_sorted_and_stable_output(self):
        profile = FrequencyProfile(
            genetic_counts={"b": 1, "a": 2},
            nongenetic_counts={"c": 3},
            genetic_total=4,
            nongenetic_total=5,
        )
        out1, out2 = io.StringIO(), io.StringIO()
        save_profile(profile, out1)
        save_profile(profile, out2)
        assert out1.getvalue() == out2.getvalue()
        body = out1.getvalue().splitlines()
        assert body[0].startswith("#")
        rows = [line.split(",")[0] for line in body[4:]]
        assert rows == sorted(rows)

    def test_file_round_trip(self, tmp_path):
        profile = build_profile([cite(1, GEN, "A"), cite(2, NON, "B")])
        path = tmp_path / "profile.csv"
        save_profile(profile, path)
        assert load_profile(path) == profile
