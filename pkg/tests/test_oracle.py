import random

import pytest

from transcheck.errors import CalibrationError, InvalidInputError, InvalidTranslationError
from transcheck.metrics import build_idf, lcs_metric
from transcheck.oracle import (
    LabeledSample,
    MAX_SLICE_TOKENS,
    ThresholdSet,
    consistency_score,
    f_measure,
    judge,
    learn_thresholds,
    retained_slices,
    subsequence_set,
    threshold_grid,
)


def brute_force_score(t_s, t_sm, metric_fn):
    """Direct enumeration of the slice-deleted subsequence pairs."""
    from transcheck.metrics import word_diff, delete_slice

    slices = word_diff(t_s, t_sm)
    set_o = [tuple(t_s)] + [
        delete_slice(t_s, s) for s in slices.slices_a if len(s) <= 5
    ]
    set_m = [tuple(t_sm)] + [
        delete_slice(t_sm, s) for s in slices.slices_b if len(s) <= 5
    ]
    return max(metric_fn(a, b) for a in set_o for b in set_m)


class TestConsistencyScore:
    def test_identical_scores_one_for_every_metric(self):
        idf = build_idf([["A", "B"], ["C"]])
        tokens = "A B C".split()
        for metric in ("LCS", "ED", "TFIDF", "BLEU"):
            score, _ = consistency_score(tokens, tokens, metric, idf)
            assert score == 1.0

    def test_reference_pair_golden_value(self):
        t_s = "A B C D F".split()
        t_sm = "B B C G H F".split()
        score, slices = consistency_score(t_s, t_sm, "LCS")
        # nine subsequence pairs; the best deletes "D" against "G H"
        assert score == brute_force_score(t_s, t_sm, lcs_metric)
        assert score == 0.75
        assert score >= lcs_metric(t_s, t_sm)
        assert slices.texts_a() == [["A"], ["D"]]
        assert slices.texts_b() == [["B"], ["G", "H"]]

    def test_single_short_slice_scores_one(self):
        # the two translations differ only in one short slice
        t_s = "the cat sat down".split()
        t_sm = "the dog sat down".split()
        score, _ = consistency_score(t_s, t_sm, "LCS")
        assert score == 1.0

    def test_long_slices_are_not_deleted(self):
        t_s = "a b c d e f g h".split()
        t_sm = "a x1 x2 x3 x4 x5 x6 h".split()
        score, slices = consistency_score(t_s, t_sm, "LCS")
        assert [len(s) for s in slices.slices_b] == [6]
        assert all(len(s) <= MAX_SLICE_TOKENS for s in retained_slices(slices.slices_b))
        # six-token slice stays, so deletion cannot reach 1.0
        assert score < 1.0

    def test_empty_translation_rejected(self):
        with pytest.raises(InvalidTranslationError):
            consistency_score([], ["a"], "LCS")

    def test_unknown_metric(self):
        with pytest.raises(InvalidInputError):
            consistency_score(["a"], ["a"], "ROUGE")

    def test_tfidf_requires_table(self):
        with pytest.raises(InvalidInputError):
            consistency_score(["a"], ["b"], "TFIDF")

    def test_bleu_skips_empty_subsequences(self):
        # each side is one big slice; deleting it leaves an empty sequence,
        # which BLEU refuses, so only the full pair is scored
        score, _ = consistency_score(["A"], ["B"], "BLEU")
        assert score == 0.0

    def test_lcs_scores_empty_subsequences(self):
        score, _ = consistency_score(["A"], ["B"], "LCS")
        assert score == 1.0  # both sides minus their slice are empty, hence equal

    def test_subsequence_set_includes_full_sequence(self):
        from transcheck.metrics import word_diff

        t_s = "A B C D F".split()
        slices = word_diff(t_s, "B B C G H F".split())
        subs = subsequence_set(t_s, slices.slices_a)
        assert tuple(t_s) in subs
        assert len(subs) == 3


def test_oracle_properties_random():
    rng = random.Random(17)
    vocab = [f"w{i}" for i in range(25)]
    idf = build_idf([[rng.choice(vocab) for _ in range(6)] for _ in range(40)])
    for _ in range(120):
        a = [rng.choice(vocab) for _ in range(rng.randint(1, 12))]
        b = [rng.choice(vocab) for _ in range(rng.randint(1, 12))]
        for metric in ("LCS", "ED", "TFIDF", "BLEU"):
            fwd, _ = consistency_score(a, b, metric, idf)
            bwd, _ = consistency_score(b, a, metric, idf)
            assert fwd == pytest.approx(bwd, abs=1e-12)
            assert 0.0 <= fwd <= 1.0
            assert consistency_score(a, a, metric, idf)[0] == 1.0


def test_monotone_subsequence_property():
    # adding a deletable slice can only raise the maximum
    t_s = "a b c d".split()
    t_sm = "a x c y".split()
    full_only = lcs_metric(t_s, t_sm)
    score, _ = consistency_score(t_s, t_sm, "LCS")
    assert score >= full_only


class TestThresholdGrid:
    def test_default_grid_covers_range(self):
        grid = threshold_grid()
        assert grid[0] == 0.8
        assert grid[-1] == 1.0
        assert len(grid) == 201

    def test_coarse_grid(self):
        grid = threshold_grid(0.01)
        assert len(grid) == 21
        assert 0.9 in grid and 0.96 in grid


def make_separated_samples(rng, n=200, separator=0.9):
    """Zero-overlap scores around the separator, pinning it on the grid."""
    samples = []
    for k in range(n // 2):
        low = separator - 0.0005 if k == 0 else rng.uniform(0.5, separator - 0.002)
        samples.append(LabeledSample({m: low for m in ("LCS", "ED", "TFIDF", "BLEU")}, False))
        high = separator if k == 0 else rng.uniform(separator, 1.0)
        samples.append(LabeledSample({m: high for m in ("LCS", "ED", "TFIDF", "BLEU")}, True))
    return samples


class TestLearnThresholds:
    def test_planted_separator(self):
        rng = random.Random(23)
        learned = learn_thresholds(make_separated_samples(rng))
        for metric in ("LCS", "ED", "TFIDF", "BLEU"):
            assert learned.thresholds[metric] == 0.9
            assert learned.f_measures[metric] == 1.0

    def test_tie_breaks_toward_lower_threshold(self):
        # scores leave a wide perfect band; the lowest grid point wins
        samples = [
            LabeledSample({"LCS": 0.85}, False),
            LabeledSample({"LCS": 0.99}, True),
        ] * 5
        learned = learn_thresholds(samples, step=0.01)
        assert learned.thresholds["LCS"] == 0.86

    def test_coarse_grid_flag(self):
        rng = random.Random(24)
        learned = learn_thresholds(make_separated_samples(rng), step=0.01)
        assert learned.grid_step == 0.01
        assert learned.thresholds["LCS"] == 0.9

    def test_degenerate_labels(self):
        same = [LabeledSample({"LCS": 0.5}, True)] * 4
        with pytest.raises(CalibrationError):
            learn_thresholds(same)
        with pytest.raises(CalibrationError):
            learn_thresholds([])

    def test_thresholds_stay_on_grid(self):
        rng = random.Random(25)
        samples = [
            LabeledSample({"LCS": rng.uniform(0.5, 1.0)}, rng.random() < 0.5)
            for _ in range(100)
        ]
        if all(s.consistent for s in samples) or not any(s.consistent for s in samples):
            samples[0] = LabeledSample({"LCS": 0.6}, not samples[0].consistent)
        learned = learn_thresholds(samples)
        assert learned.thresholds["LCS"] in threshold_grid()

    def test_f_measure_definition(self):
        scores = [0.5, 0.7, 0.95, 0.99]
        labels = [False, False, True, True]
        # threshold 0.9 flags the two true inconsistencies only
        assert f_measure(scores, labels, 0.9) == 1.0
        # threshold 0.96 adds one false positive: P=2/3, R=1
        assert f_measure(scores, labels, 0.96) == pytest.approx(0.8)


class TestJudge:
    def make_thresholds(self):
        return ThresholdSet({"LCS": 0.963, "ED": 0.963, "TFIDF": 0.999, "BLEU": 0.906}, {})

    def test_score_one_is_never_a_bug(self):
        report = judge(["a", "b"], ["a", "b"], self.make_thresholds(), "LCS")
        assert report.score == 1.0
        assert report.is_bug is False

    def test_low_score_is_a_bug(self):
        report = judge(
            "W do BAD R".split(), "M do G R".split(), self.make_thresholds(), "LCS",
            sentence_id="s1", mutant_id="m0",
        )
        assert report.score < 0.963
        assert report.is_bug is True
        assert report.sentence_id == "s1" and report.mutant_id == "m0"

    def test_score_equal_to_threshold_is_not_a_bug(self):
        thresholds = ThresholdSet({"LCS": 0.75}, {})
        report = judge("A B C D F".split(), "B B C G H F".split(), thresholds, "LCS")
        assert report.score == 0.75
        assert report.is_bug is False

    def test_report_roundtrips_to_json(self):
        report = judge(["a"], ["b"], self.make_thresholds(), "ED")
        row = report.to_json()
        assert row["metric"] == "ED"
        assert row["is_bug"] == report.is_bug
        assert "slices" in row


class TestThresholdSetPersistence:
    def test_roundtrip(self, tmp_path):
        original = ThresholdSet(
            {"LCS": 0.963, "ED": 0.963, "TFIDF": 0.999, "BLEU": 0.906},
            {"LCS": 0.81, "ED": 0.82, "TFIDF": 0.79, "BLEU": 0.82},
            grid_step=0.001,
        )
        path = tmp_path / "thresholds.txt"
        original.save(path)
        loaded = ThresholdSet.load(path)
        assert loaded == original
