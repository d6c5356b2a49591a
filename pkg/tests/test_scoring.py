import io
import random

from litriage.chisq import IndicatorProfile
from litriage.corpus import Citation, DomainLabel
from litriage.scoring import (
    Threshold,
    classify,
    save_histogram,
    save_scores,
    score_citation,
    score_corpus,
)


def profile_of(signs: dict[str, int]) -> IndicatorProfile:
    return IndicatorProfile(signs=signs, genetic_total=10, nongenetic_total=10)


def cite(i, *descriptors):
    return Citation(id=str(i), descriptors=frozenset(descriptors))


class TestScoreCitation:
    def test_signs_sum_and_unknown_is_zero(self):
        profile = profile_of({"A": 1, "B": 1, "C": -1})
        assert score_citation(cite(1, "A", "B", "C", "D"), profile) == 1

    def test_no_descriptors_scores_zero(self):
        assert score_citation(cite(1), profile_of({"A": 1})) == 0

    def test_presence_semantics(self):
        # duplicates collapsed at construction; C counts once
        c = Citation(id="1", descriptors=frozenset(["C", "C"]))
        assert score_citation(c, profile_of({"C": -1})) == -1

    def test_score_bounded_by_descriptor_count(self):
        rng = random.Random(1)
        signs = {f"D{i}": rng.choice([1, -1]) for i in range(30)}
        profile = profile_of(signs)
        for _ in range(100):
            c = cite(0, *rng.sample(sorted(signs), rng.randrange(0, 12)))
            assert abs(score_citation(c, profile)) <= len(c.descriptors)

    def test_adding_positive_descriptor_raises_score_by_one(self):
        profile = profile_of({"A": 1, "B": -1, "P": 1})
        base = cite(1, "A", "B")
        more = cite(1, "A", "B", "P")
        assert score_citation(more, profile) == score_citation(base, profile) + 1

    def test_adding_unknown_descriptor_changes_nothing(self):
        profile = profile_of({"A": 1})
        assert score_citation(cite(1, "A"), profile) == score_citation(
            cite(1, "A", "ZZZ"), profile
        )


class TestScoreCorpus:
    def test_empty_corpus(self):
        report = score_corpus([], profile_of({"A": 1}))
        assert report.scores == {}
        assert report.histogram == {}

    def test_histogram_counts(self):
        profile = profile_of({"A": 1, "B": 1, "C": -1})
        citations = [cite(1, "A", "B"), cite(2, "A", "B"), cite(3, "C")]
        report = score_corpus(citations, profile)
        assert report.histogram == {2: 2, -1: 1}

    def test_histogram_total_conservation(self):
        rng = random.Random(5)
        signs = {f"D{i}": rng.choice([1, -1]) for i in range(40)}
        profile = profile_of(signs)
        citations = [
            cite(i, *rng.sample(sorted(signs), rng.randrange(0, 10)))
            for i in range(734)
        ]
        report = score_corpus(citations, profile)
        assert sum(report.histogram.values()) == 734
        assert report.total == 734

    def test_parallel_identical_to_serial(self):
        rng = random.Random(6)
        signs = {f"D{i}": rng.choice([1, -1]) for i in range(50)}
        profile = profile_of(signs)
        citations = [
            cite(i, *rng.sample(sorted(signs), rng.randrange(0, 8)))
            for i in range(500)
        ]
        serial = score_corpus(citations, profile, workers=1)
        parallel = score_corpus(citations, profile, workers=3, chunk_size=37)
        assert serial == parallel
        assert list(serial.scores) == list(parallel.scores)  # corpus order kept

    def test_profile_negation_negates_scores(self):
        rng = random.Random(7)
        signs = {f"D{i}": rng.choice([1, -1]) for i in range(30)}
        negated = profile_of({d: -s for d, s in signs.items()})
        profile = profile_of(signs)
        citations = [
            cite(i, *rng.sample(sorted(signs), rng.randrange(0, 10)))
            for i in range(200)
        ]
        forward = score_corpus(citations, profile)
        backward = score_corpus(citations, negated)
        for cid, score in forward.scores.items():
            assert backward.scores[cid] == -score

    def test_negation_complements_partition_with_mapped_threshold(self):
        # theta -> -theta + 1 exactly complements the split on non-tied
        # scores; asserted via score negation.
        rng = random.Random(8)
        signs = {f"D{i}": rng.choice([1, -1]) for i in range(30)}
        profile = profile_of(signs)
        citations = [
            cite(i, *rng.sample(sorted(signs), rng.randrange(1, 10)))
            for i in range(200)
        ]
        theta = 2
        report = score_corpus(citations, profile)
        for score in report.scores.values():
            original = classify(score, theta)
            mirrored = classify(-score, -theta + 1)
            assert (original is DomainLabel.GENETIC) == (
                mirrored is DomainLabel.NONGENETIC
            )


class TestClassify:
    def test_boundary_inclusive(self):
        assert classify(3, 3) is DomainLabel.GENETIC

    def test_below_threshold(self):
        assert classify(2, 3) is DomainLabel.NONGENETIC

    def test_extreme_low_threshold_accepts_everything(self):
        for score in (-50, 0, 50):
            assert classify(score, -(10**9)) is DomainLabel.GENETIC

    def test_threshold_type(self):
        assert Threshold(theta=3).theta == 3


class TestEmission:
    def test_scores_csv(self):
        profile = profile_of({"A": 1})
        report = score_corpus([cite(1, "A"), cite(2)], profile)
        out = io.StringIO()
        save_scores(report, 1, out)
        assert out.getvalue().splitlines() == [
            "id,score,label",
            "1,1,genetic",
            "2,0,nongenetic",
        ]

    def test_histogram_csv_sorted(self):
        report = score_corpus(
            [cite(1, "A"), cite(2, "B"), cite(3, "B")], profile_of({"A": 1, "B": -1})
        )
        out = io.StringIO()
        save_histogram(report, out)
        assert out.getvalue().splitlines() == ["score,count", "-1,2", "1,1"]
