"""Segmentation, tokenization, vocabulary and embedding-table contracts."""

from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brenda.textproc import (
    PAD_ID,
    UNK_ID,
    Claim,
    EmbeddingLoadError,
    EmbeddingTable,
    build_vocabulary,
    content_tokens,
    embed,
    load_embeddings,
    segment_sentences,
    tokenize,
)

FIXTURES = Path(__file__).parent / "fixtures"


class TestSegmentation:
    def test_delimiters(self):
        assert [s.text for s in segment_sentences("A. B? C!")] == ["A.", "B?", "C!"]

    def test_empty_input(self):
        assert segment_sentences("") == []
        assert segment_sentences("   \n\t ") == []

    def test_abbreviation_guard(self):
        got = [s.text for s in segment_sentences("Dr. Smith spoke. He left.")]
        assert got == ["Dr. Smith spoke.", "He left."]

    def test_indices_are_positions(self):
        sentences = segment_sentences("One. Two. Three.")
        assert [s.index for s in sentences] == [0, 1, 2]

    def test_hand_segmented_fixture(self):
        source = (FIXTURES / "segmentation_source.txt").read_text(encoding="utf-8")
        expected = (FIXTURES / "segmentation_expected.txt").read_text(
            encoding="utf-8").splitlines()
        assert len(expected) == 50
        assert [s.text for s in segment_sentences(source)] == expected

    def test_no_break_without_whitespace(self):
        assert [s.text for s in segment_sentences("Rates hit 4.5 percent.")] == [
            "Rates hit 4.5 percent."]

    @given(st.text(max_size=300))
    @settings(max_examples=200)
    def test_nonwhitespace_characters_preserved(self, text):
        sentences = segment_sentences(text)
        joined = " ".join(s.text for s in sentences)
        strip = lambda s: Counter(c for c in s if not c.isspace())
        assert strip(joined) == strip(text)
        assert all(s.text.strip() for s in sentences)


class TestTokenize:
    def test_hyphen_kept_inside_token(self):
        assert tokenize("Covid-19 can be cured") == ["covid-19", "can", "be", "cured"]

    def test_punctuation_split(self):
        assert tokenize("Hello, world!") == ["hello", ",", "world", "!"]

    def test_no_empty_tokens(self):
        assert all(tokenize("  a  ,,  b  "))

    def test_content_tokens_drop_bare_punctuation(self):
        assert content_tokens("Hello, world!") == ["hello", "world"]
        assert content_tokens("?!...") == []

    @given(st.text(max_size=200))
    @settings(max_examples=200)
    def test_idempotent_under_space_join(self, text):
        once = tokenize(text)
        assert tokenize(" ".join(once)) == once

    def test_fixture_corpus_idempotence(self):
        source = (FIXTURES / "segmentation_source.txt").read_text(encoding="utf-8")
        for sentence in segment_sentences(source):
            once = tokenize(sentence.text)
            assert tokenize(" ".join(once)) == once


class TestVocabulary:
    def test_frequency_cutoff(self):
        vocab = build_vocabulary([["a", "a", "b"]], min_count=2)
        assert vocab.tokens == ["<pad>", "<unk>", "a"]

    def test_empty_corpus(self):
        assert len(build_vocabulary([], min_count=1)) == 2

    def test_specials_and_ordering(self):
        vocab = build_vocabulary([["b", "b", "a", "c", "c"]], min_count=1)
        # b and c tie on frequency 2 -> lexicographic; then a with 1.
        assert vocab.tokens == ["<pad>", "<unk>", "b", "c", "a"]

    def test_round_trip(self):
        vocab = build_vocabulary([["x", "y", "z", "y"]], min_count=1)
        for i in range(2, len(vocab)):
            assert vocab.id_of(vocab.token_of(i)) == i

    def test_unknown_maps_to_unk(self):
        vocab = build_vocabulary([["a"]], min_count=1)
        assert vocab.id_of("missing") == UNK_ID

    def test_distinct_token_count(self):
        source = (FIXTURES / "segmentation_source.txt").read_text(encoding="utf-8")
        corpus = [tokenize(s.text) for s in segment_sentences(source)]
        vocab = build_vocabulary(corpus, min_count=1)
        distinct = len({t for toks in corpus for t in toks})
        assert len(vocab) == distinct + 2

    def test_min_count_validation(self):
        with pytest.raises(ValueError):
            build_vocabulary([], min_count=0)


def vector_line(token, values):
    return token + " " + " ".join(f"{v:.3f}" for v in values)


class TestEmbeddings:
    def test_stream_vector_copied(self):
        vocab = build_vocabulary([["cat"]], min_count=1)
        line = vector_line("cat", [0.1] * 100)
        table = load_embeddings([line], vocab, 100)
        assert table.row("cat")[0] == pytest.approx(0.1)

    def test_missing_token_uniform_init(self):
        vocab = build_vocabulary([["cat", "dog"]], min_count=1)
        table = load_embeddings([vector_line("cat", [0.1] * 10)], vocab, 10, seed=3)
        row = table.row("dog")
        assert np.all(np.abs(row) <= 0.05)
        assert np.any(row != 0)

    def test_pad_row_zero(self):
        vocab = build_vocabulary([["cat"]], min_count=1)
        table = load_embeddings([], vocab, 8, seed=0)
        assert np.all(table.matrix[PAD_ID] == 0)

    def test_arity_error_names_line(self):
        vocab = build_vocabulary([["cat"]], min_count=1)
        with pytest.raises(EmbeddingLoadError, match="line 1"):
            load_embeddings(["cat 0.1 0.2"], vocab, 100)

    def test_non_numeric_error_names_line(self):
        vocab = build_vocabulary([["cat"]], min_count=1)
        with pytest.raises(EmbeddingLoadError, match="line 2"):
            load_embeddings([vector_line("dog", [0.0] * 4), "cat a b c d"], vocab, 4)

    def test_seed_determinism(self):
        vocab = build_vocabulary([["cat", "dog"]], min_count=1)
        t1 = load_embeddings([], vocab, 6, seed=9)
        t2 = load_embeddings([], vocab, 6, seed=9)
        assert np.array_equal(t1.matrix, t2.matrix)


class TestEmbedLookup:
    @pytest.fixture()
    def table(self):
        vocab = build_vocabulary([["known", "word"]], min_count=1)
        return EmbeddingTable.random(vocab, 12, seed=4)

    def test_known_token_row(self, table):
        out = embed(["known"], table.vocab, table)
        assert np.array_equal(out[0], table.row("known"))

    def test_unknown_token_unk_row(self, table):
        out = embed(["nope"], table.vocab, table)
        assert np.array_equal(out[0], table.matrix[UNK_ID])

    def test_empty_token_list(self, table):
        assert embed([], table.vocab, table).shape == (0, 12)

    def test_row_count_matches_tokens(self, table):
        source = (FIXTURES / "segmentation_source.txt").read_text(encoding="utf-8")
        for sentence in segment_sentences(source):
            toks = tokenize(sentence.text)
            assert embed(toks, table.vocab, table).shape == (len(toks), 12)


class TestClaim:
    def test_tokens_follow_text(self):
        claim = Claim("Covid-19 can be cured")
        assert list(claim.tokens) == ["covid-19", "can", "be", "cured"]

    def test_aspect_keys_validated(self):
        Claim("x", aspects={"author": "a", "topic": "t", "domain": "d"})
        with pytest.raises(ValueError):
            Claim("x", aspects={"publisher": "p"})
