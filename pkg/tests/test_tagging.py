import sys
import textwrap

import pytest

from transcheck.tagging import ExternalProcessTagger, LexiconTagger, is_replaceable_tag


@pytest.fixture(scope="module")
def tagger():
    return LexiconTagger()


class TestLexiconTagger:
    def test_golden_sentence(self, tagger):
        assert tagger.tag(["He", "likes", "cats"]) == ["PRP", "VBZ", "NNS"]

    def test_numeric_token(self, tagger):
        assert tagger.tag(["4.4"]) == ["CD"]
        assert tagger.tag(["1,000"]) == ["CD"]
        assert tagger.tag(["17"]) == ["CD"]

    def test_number_words(self, tagger):
        assert tagger.tag_word("two") == "CD"
        assert tagger.tag_word("one") == "CD"
        assert tagger.tag_word("Six") == "CD"

    def test_good_one_vs_good_another(self, tagger):
        # the filter's reference case: the determiner breaks the tag context
        assert tagger.tag(["a", "good", "one"]) == ["DT", "JJ", "CD"]
        assert tagger.tag(["a", "good", "another"]) == ["DT", "JJ", "DT"]

    def test_plural_from_noun_stem(self, tagger):
        assert tagger.tag_word("dogs") == "NNS"
        assert tagger.tag_word("earthquakes") == "NNS"

    def test_third_person_from_verb_stem(self, tagger):
        assert tagger.tag_word("makes") == "VBZ"
        assert tagger.tag_word("produces") == "VBZ"

    def test_suffix_rules(self, tagger):
        assert tagger.tag_word("quickly") == "RB"
        assert tagger.tag_word("running") == "VBG"
        assert tagger.tag_word("jumped") == "VBD"
        assert tagger.tag_word("happiness") == "NN"
        assert tagger.tag_word("joyful") == "JJ"

    def test_capitalised_unknown_is_proper_noun(self, tagger):
        assert tagger.tag_word("Uccialli") == "NNP"

    def test_punctuation(self, tagger):
        assert tagger.tag([".", ",", "?"]) == [".", ",", "."]

    def test_case_insensitive_lexicon(self, tagger):
        assert tagger.tag_word("He") == "PRP"
        assert tagger.tag_word("The") == "DT"

    def test_extra_lexicon_overrides(self):
        custom = LexiconTagger({"flurble": "JJ", "good": "NN"})
        assert custom.tag_word("flurble") == "JJ"
        assert custom.tag_word("good") == "NN"

    def test_from_file(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("# comment\nflurble\tNN\nzap\tVB\n")
        custom = LexiconTagger.from_file(path)
        assert custom.tag_word("flurble") == "NN"
        assert custom.tag_word("zaps") == "VBZ"

    def test_determinism(self, tagger):
        tokens = "the women do good research".split()
        assert tagger.tag(tokens) == tagger.tag(tokens)


ECHO_TAGGER = textwrap.dedent(
    """
    import sys
    for line in sys.stdin:
        tokens = line.split()
        print(" ".join("X" + t for t in tokens), flush=True)
    """
)


class TestExternalProcessTagger:
    def test_line_protocol(self):
        ext = ExternalProcessTagger([sys.executable, "-c", ECHO_TAGGER])
        try:
            assert ext.tag(["a", "b"]) == ["Xa", "Xb"]
            assert ext.tag(["c"]) == ["Xc"]
        finally:
            ext.close()

    def test_tag_count_mismatch_raises(self):
        bad = ExternalProcessTagger(
            [sys.executable, "-c",
             "import sys\n[print('one', flush=True) for _ in sys.stdin]"]
        )
        try:
            with pytest.raises(RuntimeError):
                bad.tag(["a", "b"])
        finally:
            bad.close()


def test_replaceable_tags():
    assert is_replaceable_tag("NN")
    assert is_replaceable_tag("NNS")
    assert is_replaceable_tag("NNP")
    assert is_replaceable_tag("JJ")
    assert is_replaceable_tag("JJR")
    assert is_replaceable_tag("CD")
    assert not is_replaceable_tag("VB")
    assert not is_replaceable_tag("DT")
    assert not is_replaceable_tag("RB")
