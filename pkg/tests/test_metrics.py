import math
import random
from fractions import Fraction

import pytest

from transcheck.errors import InvalidInputError
from transcheck.metrics import (
    DegenerateVectorWarning,
    IdfTable,
    bag_of_words,
    bleu_directional,
    bleu_metric,
    build_idf,
    delete_slice,
    ed_metric,
    edit_distance,
    lcs_length,
    lcs_metric,
    modified_ngram_precision,
    remove_all_slices,
    splice_back,
    tfidf_metric,
    word_diff,
)

from oracles import all_sequences, ed_oracle, lcs_oracle


# ---------------------------------------------------------------------------
# word_diff
# ---------------------------------------------------------------------------

class TestWordDiff:
    def test_reference_example(self):
        diff = word_diff("A B C D F".split(), "B B C G H F".split())
        assert diff.texts_a() == [["A"], ["D"]]
        assert diff.texts_b() == [["B"], ["G", "H"]]

    def test_identical(self):
        diff = word_diff(["x", "y"], ["x", "y"])
        assert diff.slices_a == () and diff.slices_b == ()

    def test_disjoint(self):
        diff = word_diff(["A"], ["B"])
        assert diff.texts_a() == [["A"]]
        assert diff.texts_b() == [["B"]]

    def test_slices_are_maximal_runs(self):
        diff = word_diff("a b c".split(), "a x y c".split())
        assert diff.texts_a() == [["b"]]
        assert diff.texts_b() == [["x", "y"]]

    def test_common_subsequences_match(self):
        rng = random.Random(7)
        vocab = list("abcde")
        for _ in range(300):
            a = [rng.choice(vocab) for _ in range(rng.randint(0, 12))]
            b = [rng.choice(vocab) for _ in range(rng.randint(0, 12))]
            diff = word_diff(a, b)
            common_a = remove_all_slices(a, diff.slices_a)
            common_b = remove_all_slices(b, diff.slices_b)
            assert common_a == common_b
            assert len(common_a) == lcs_oracle(tuple(a), tuple(b))

    def test_splice_back_reconstructs(self):
        rng = random.Random(8)
        vocab = list("abc")
        for _ in range(300):
            a = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
            b = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
            diff = word_diff(a, b)
            assert splice_back(remove_all_slices(a, diff.slices_a), diff.slices_a) == tuple(a)
            assert splice_back(remove_all_slices(b, diff.slices_b), diff.slices_b) == tuple(b)

    def test_delete_slice(self):
        diff = word_diff("A B C D F".split(), "B B C G H F".split())
        assert delete_slice("A B C D F".split(), diff.slices_a[0]) == ("B", "C", "D", "F")
        assert delete_slice("A B C D F".split(), diff.slices_a[1]) == ("A", "B", "C", "F")

    def test_mirror_symmetry(self):
        rng = random.Random(11)
        vocab = list("abcd")
        for _ in range(300):
            a = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
            b = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
            fwd = word_diff(a, b)
            bwd = word_diff(b, a)
            assert fwd.slices_a == bwd.slices_b
            assert fwd.slices_b == bwd.slices_a


# ---------------------------------------------------------------------------
# LCS / ED metrics
# ---------------------------------------------------------------------------

class TestLcsMetric:
    def test_reference_example(self):
        # character-level sequences, LCS is 3 of max length 6
        assert lcs_length(tuple("ABCDGH"), tuple("AEDFHR")) == 3
        assert lcs_metric(tuple("ABCDGH"), tuple("AEDFHR")) == 0.5

    def test_identical(self):
        assert lcs_metric(["a", "b", "c"], ["a", "b", "c"]) == 1.0

    def test_disjoint(self):
        assert lcs_metric(["a"], ["b"]) == 0.0

    def test_both_empty(self):
        assert lcs_metric([], []) == 1.0


class TestEdMetric:
    def test_identical(self):
        assert ed_metric(["a", "b"], ["a", "b"]) == 1.0

    def test_single_substitution(self):
        assert edit_distance("A B C".split(), "A X C".split()) == 1
        assert ed_metric("A B C".split(), "A X C".split()) == pytest.approx(1 - 1 / 3)

    def test_short_vs_longer(self):
        assert edit_distance(["A"], ["B", "C"]) == 2
        assert ed_metric(["A"], ["B", "C"]) == 0.0

    def test_both_empty(self):
        assert ed_metric([], []) == 1.0


def test_metrics_match_recursive_oracles_small():
    # the exhaustive sweep lives in the acceptance suite; this is a quick gate
    seqs = list(all_sequences("xy", 4))
    for a in seqs:
        for b in seqs:
            assert lcs_length(a, b) == lcs_oracle(a, b)
            assert edit_distance(a, b) == ed_oracle(a, b)


def test_ed_lcs_relation():
    seqs = list(all_sequences("xyz", 3))
    for a in seqs:
        for b in seqs:
            if not a and not b:
                continue
            assert ed_oracle(a, b) >= max(len(a), len(b)) - lcs_oracle(a, b)


# ---------------------------------------------------------------------------
# tf-idf
# ---------------------------------------------------------------------------

class TestIdf:
    def test_reference_weights(self):
        table = build_idf([["A", "B"], ["A"]])
        assert table.corpus_size == 2
        assert table.weight("A") == pytest.approx(math.log(3 / 3))
        assert table.weight("B") == pytest.approx(math.log(3 / 2))

    def test_unknown_token_weight(self):
        table = build_idf([["A", "B"], ["A"]])
        assert table.weight("zzz") == pytest.approx(math.log(3))

    def test_empty_corpus_degenerate(self):
        table = build_idf([])
        assert table.degenerate
        assert table.weight("anything") == 0.0

    def test_roundtrip(self, tmp_path):
        table = build_idf([["A", "B"], ["A"], ["C", "C"]])
        path = tmp_path / "idf.tsv"
        table.save(path)
        loaded = IdfTable.load(path)
        assert loaded.doc_freq == table.doc_freq
        assert loaded.corpus_size == table.corpus_size

    def test_doc_freq_counts_sentences_not_tokens(self):
        table = build_idf([["A", "A", "A"], ["A"]])
        assert table.doc_freq["A"] == 2


class TestTfidfMetric:
    def test_reference_bag(self):
        assert bag_of_words("A B C A".split()) == {"A": 2, "B": 1, "C": 1}

    def test_identical(self):
        table = build_idf([["A", "B"], ["C"]])
        assert tfidf_metric(["A", "B"], ["A", "B"], table) == 1.0

    def test_disjoint_uniform(self):
        table = IdfTable({}, 10)  # every token weight log(11)
        assert tfidf_metric(["A", "A"], ["B"], table) == 0.0

    def test_zero_vector_warns_and_scores_zero(self):
        table = build_idf([["A"]])  # weight of A is log(2/2)=0
        with pytest.warns(DegenerateVectorWarning):
            assert tfidf_metric(["A"], ["A", "B"], table) == 0.0

    def test_weighting_changes_score(self):
        heavy_b = IdfTable({"A": 9, "B": 0}, 9)
        uniform = IdfTable({}, 9)
        t1, t2 = ["A", "B"], ["A", "C"]
        assert tfidf_metric(t1, t2, heavy_b) < tfidf_metric(t1, t2, uniform)


# ---------------------------------------------------------------------------
# BLEU
# ---------------------------------------------------------------------------

class TestBleu:
    def test_reference_two_gram_precision(self):
        matched, total = modified_ngram_precision("A A B C".split(), "A B B C".split(), 2)
        assert (matched, total) == (2, 3)
        assert Fraction(matched, total) == Fraction(2, 3)

    def test_identical(self):
        assert bleu_metric(list("ABCD"), list("ABCD")) == 1.0

    def test_identical_short(self):
        assert bleu_metric(["A"], ["A"]) == 1.0

    def test_no_fourgram_direction_is_zero(self):
        reference = "A B C D E F".split()
        candidate = ["A", "B", "C"]  # all unigrams match, no 4-gram exists
        assert bleu_directional(reference, candidate) == 0.0

    def test_max_of_directions(self):
        t1 = "A B C D".split()
        t2 = "A B C D E".split()
        assert bleu_metric(t1, t2) == max(bleu_directional(t1, t2), bleu_directional(t2, t1))

    def test_empty_raises(self):
        with pytest.raises(InvalidInputError):
            bleu_metric([], ["A"])

    def test_brevity_penalty_direction(self):
        # same n-gram profile, shorter candidate is penalised
        reference = "A B C D A B C D".split()
        candidate = "A B C D".split()
        direct = bleu_directional(reference, candidate)
        assert 0.0 < direct < 1.0
        assert direct == pytest.approx(
            math.exp(1 - 8 / 4) * math.exp(
                (math.log(4 / 4) + math.log(3 / 3) + math.log(2 / 2) + math.log(1 / 1)) / 4
            )
        )

    def test_clipping_caps_unigram_precision(self):
        rng = random.Random(9)
        for _ in range(100):
            reps = rng.randint(2, 8)
            ref_count = rng.randint(1, 3)
            reference = ["A"] * ref_count + ["B"]
            candidate = ["A"] * reps
            matched, total = modified_ngram_precision(reference, candidate, 1)
            assert matched / total <= ref_count / reps


# ---------------------------------------------------------------------------
# shared metric properties
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def idf_table():
    rng = random.Random(3)
    vocab = [f"w{i}" for i in range(30)]
    corpus = [[rng.choice(vocab) for _ in range(rng.randint(1, 8))] for _ in range(50)]
    return build_idf(corpus)


def test_symmetry_range_and_identity(idf_table):
    rng = random.Random(4)
    vocab = [f"w{i}" for i in range(30)]
    metrics = [
        lcs_metric,
        ed_metric,
        lambda a, b: tfidf_metric(a, b, idf_table),
        bleu_metric,
    ]
    for _ in range(200):
        a = [rng.choice(vocab) for _ in range(rng.randint(1, 10))]
        b = [rng.choice(vocab) for _ in range(rng.randint(1, 10))]
        for metric in metrics:
            forward, backward = metric(a, b), metric(b, a)
            assert forward == pytest.approx(backward, abs=1e-12)
            assert 0.0 <= forward <= 1.0
            assert metric(a, a) == 1.0
