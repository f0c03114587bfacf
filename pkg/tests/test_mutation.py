import random

import pytest

from transcheck.embeddings import corpus_from_iterable
from transcheck.errors import InvalidInputError, InvalidSentenceError
from transcheck.mutation import (
    MutantSentence,
    MutationStats,
    TaggedSentence,
    generate_mutants,
    pos_tag,
    structural_filter,
)
from transcheck.tagging import LexiconTagger, is_replaceable_tag


def corpus(*rows):
    return corpus_from_iterable(
        [(a, b, s, s) for a, b, s in rows], threshold=0.9
    )


class TestPosTag:
    def test_tokenizes_and_tags(self):
        tagged = pos_tag("He likes cats")
        assert tagged.tokens == ("He", "likes", "cats")
        assert tagged.tags == ("PRP", "VBZ", "NNS")

    def test_empty_raises(self):
        with pytest.raises(InvalidSentenceError):
            pos_tag("")
        with pytest.raises(InvalidSentenceError):
            pos_tag("   ")

    def test_numeric_sentence(self):
        assert pos_tag("4.4").tags == ("CD",)

    def test_punctuation_separated(self):
        tagged = pos_tag("He likes cats.")
        assert tagged.tokens == ("He", "likes", "cats", ".")


class TestTaggedSentence:
    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            TaggedSentence(("a",), ("DT", "NN"))

    def test_empty_rejected(self):
        with pytest.raises(InvalidSentenceError):
            TaggedSentence((), ())


class TestMutantSentence:
    def test_tokens_differ_at_one_position(self):
        base = pos_tag("boys play")
        mutant = MutantSentence(base, 0, "boys", "girls")
        assert mutant.tokens == ("girls", "play")
        assert sum(a != b for a, b in zip(mutant.tokens, base.tokens)) == 1

    def test_same_word_rejected(self):
        base = pos_tag("boys play")
        with pytest.raises(InvalidInputError):
            MutantSentence(base, 0, "boys", "boys")


class TestStructuralFilter:
    def test_noun_for_noun_passes(self):
        base = pos_tag("boys play")
        mutant = MutantSentence(base, 0, "boys", "girls")
        assert structural_filter(base, mutant) is True

    def test_good_one_to_good_another_fails(self):
        base = pos_tag("a good one")
        mutant = MutantSentence(base, 2, "one", "another")
        assert structural_filter(base, mutant) is False
        assert structural_filter(base, mutant, mode="word") is False

    def test_number_to_noun_fails(self):
        base = pos_tag("4 cats")
        assert base.tags[0] == "CD"
        mutant = MutantSentence(base, 0, "4", "fluffy")
        # the replacement no longer tags CD, so the mutated position changes
        assert structural_filter(base, mutant) is False

    def test_word_mode_checks_only_the_replacement(self):
        class FlipNeighbourTagger(LexiconTagger):
            # context-sensitive toy: seeing "girls" turns "play" into a noun
            def tag(self, tokens):
                tags = super().tag(tokens)
                if "girls" in tokens:
                    tags = ["NN" if t == "VBP" else t for t in tags]
                return tags

        tagger = FlipNeighbourTagger()
        base = pos_tag("boys play", tagger)
        mutant = MutantSentence(base, 0, "boys", "girls")
        assert structural_filter(base, mutant, tagger, mode="word") is True
        assert structural_filter(base, mutant, tagger, mode="sentence") is False

    def test_tagger_failure_rejects(self):
        class Boom:
            def tag(self, tokens):
                raise RuntimeError("boom")

        base = pos_tag("boys play")
        mutant = MutantSentence(base, 0, "boys", "girls")
        assert structural_filter(base, mutant, Boom()) is False

    def test_unknown_mode(self):
        base = pos_tag("boys play")
        mutant = MutantSentence(base, 0, "boys", "girls")
        with pytest.raises(InvalidInputError):
            structural_filter(base, mutant, mode="both")


class TestGenerateMutants:
    def test_single_replacement(self):
        base = pos_tag("boys play")
        mutants = generate_mutants(base, corpus(("boys", "girls", 0.95)))
        assert [m.tokens for m in mutants] == [("girls", "play")]
        assert mutants[0].passed_filter

    def test_no_eligible_positions(self):
        base = pos_tag("he can go")  # PRP MD VB
        assert all(not is_replaceable_tag(t) for t in base.tags)
        mutants = generate_mutants(base, corpus(("he", "she", 0.99)))
        assert mutants == []

    def test_no_corpus_hits(self):
        base = pos_tag("boys play")
        assert generate_mutants(base, corpus(("cats", "dogs", 0.95))) == []

    def test_budget_truncates_deterministically(self):
        base = pos_tag("boys like cats")
        sim = corpus(
            ("boys", "girls", 0.99),
            ("boys", "kids", 0.95),
            ("cats", "dogs", 0.99),
        )
        one = generate_mutants(base, sim, max_mutants=1)
        assert len(one) == 1
        # earliest position first, then highest minimum similarity
        assert one[0].tokens == ("girls", "like", "cats")
        all_of_them = generate_mutants(base, sim, max_mutants=5)
        assert [m.tokens for m in all_of_them] == [
            ("girls", "like", "cats"),
            ("kids", "like", "cats"),
            ("boys", "like", "dogs"),
        ]

    def test_zero_budget_rejected(self):
        base = pos_tag("boys play")
        with pytest.raises(InvalidInputError):
            generate_mutants(base, corpus(("boys", "girls", 0.9)), max_mutants=0)

    def test_filtered_candidates_counted(self):
        base = pos_tag("a good one")
        sim = corpus(("one", "another", 0.95))
        stats = MutationStats()
        mutants = generate_mutants(base, sim, stats=stats)
        assert mutants == []
        assert stats.candidates == 1
        assert stats.rejected == 1
        assert stats.emitted == 0

    def test_determinism(self):
        base = pos_tag("boys like cats")
        sim = corpus(("boys", "girls", 0.99), ("cats", "dogs", 0.98))
        first = generate_mutants(base, sim, max_mutants=5)
        second = generate_mutants(base, sim, max_mutants=5)
        assert [(m.mutated_index, m.replacement_word) for m in first] == [
            (m.mutated_index, m.replacement_word) for m in second
        ]


def test_mutation_invariants_random_sentences():
    rng = random.Random(13)
    nouns = ["cat", "dog", "boy", "girl", "teacher", "doctor"]
    adjs = ["good", "great", "fine", "nice"]
    fillers = ["the", "a", "very"]
    verbs = ["likes", "sees"]
    pairs = [
        ("cat", "dog", 0.96), ("boy", "girl", 0.95), ("teacher", "doctor", 0.93),
        ("good", "great", 0.97), ("fine", "nice", 0.92),
    ]
    sim = corpus(*pairs)
    tagger = LexiconTagger()
    for _ in range(150):
        words = [rng.choice(fillers), rng.choice(adjs), rng.choice(nouns),
                 rng.choice(verbs), rng.choice(fillers), rng.choice(nouns)]
        base = pos_tag(" ".join(words), tagger)
        for mutant in generate_mutants(base, sim, max_mutants=5, tagger=tagger):
            # single edit
            assert sum(x != y for x, y in zip(mutant.tokens, base.tokens)) == 1
            # eligibility of the replaced position
            assert is_replaceable_tag(base.tags[mutant.mutated_index])
            # filter soundness: re-tagging reproduces the original tags
            assert tuple(tagger.tag(list(mutant.tokens))) == base.tags
