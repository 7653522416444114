"""Corpus and lexicon loading: tokenization, validation, round-trips."""

import numpy as np
import pytest

from socsent.corpus import (
    NEGATIVE,
    NEUTRAL,
    POSITIVE,
    URL_TOKEN,
    USER_TOKEN,
    CorpusFormatError,
    Document,
    load_corpus,
    load_lexicon,
    load_word_embeddings,
    make_corpus,
    save_corpus,
    save_lexicon,
    save_word_embeddings,
    tokenize,
    WordEmbeddingTable,
)


class TestTokenize:
    def test_lowercases_and_splits_on_whitespace(self):
        assert tokenize("Good   MORNING\tworld") == ["good", "morning", "world"]

    def test_urls_collapse_to_sentinel(self):
        assert tokenize("see https://x.y/z and HTTP://a.b") == ["see", URL_TOKEN, "and", URL_TOKEN]

    def test_mentions_collapse_to_sentinel(self):
        assert tokenize("hey @Alice , @bob!") == ["hey", USER_TOKEN, ",", USER_TOKEN]

    def test_bare_at_sign_is_kept(self):
        assert tokenize("meet @ noon") == ["meet", "@", "noon"]

    def test_idempotent_on_its_own_output(self):
        text = "Check https://a.b from @carol NOW"
        once = tokenize(text)
        assert tokenize(" ".join(once)) == once

    def test_empty_string_gives_no_tokens(self):
        assert tokenize("   ") == []


class TestDocument:
    def test_unknown_label_rejected(self):
        with pytest.raises(CorpusFormatError):
            Document(id="d1", author="a", label="meh", tokens=("hi",))

    def test_valid_labels_accepted(self):
        for label in (POSITIVE, NEGATIVE, NEUTRAL):
            Document(id="d", author="a", label=label, tokens=())


class TestCorpusIO:
    def make_docs(self):
        return [
            Document(id="d1", author="a1", label=POSITIVE, tokens=("good", "day")),
            Document(id="d2", author="a2", label=NEGATIVE, tokens=("bad",)),
            Document(id="d3", author="a1", label=NEUTRAL, tokens=("ok", "then")),
        ]

    def test_round_trip(self, tmp_path):
        corpus = make_corpus(self.make_docs())
        path = tmp_path / "c.tsv"
        save_corpus(corpus, path)
        loaded = load_corpus(path)
        assert loaded.documents == corpus.documents

    def test_class_counts_cover_all_labels(self):
        corpus = make_corpus(self.make_docs()[:2])
        assert corpus.class_counts == {POSITIVE: 1, NEGATIVE: 1, NEUTRAL: 0}

    def test_duplicate_document_id_rejected(self):
        docs = self.make_docs()
        docs.append(Document(id="d1", author="a9", label=POSITIVE, tokens=()))
        with pytest.raises(CorpusFormatError, match="duplicate"):
            make_corpus(docs)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\ta\tpositive\thi there\n\nd2\tb\tnegative\tboo\n")
        assert len(load_corpus(path)) == 2

    def test_wrong_field_count_names_line(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\ta\tpositive\thi\nd2\ta\tnegative\n")
        with pytest.raises(CorpusFormatError, match="line 2"):
            load_corpus(path)

    def test_unknown_label_names_line(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\ta\tgreat\thi\n")
        with pytest.raises(CorpusFormatError, match="line 1"):
            load_corpus(path)

    def test_text_is_tokenized_on_load(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\ta\tpositive\tHello @bob https://x.y\n")
        doc = load_corpus(path).documents[0]
        assert doc.tokens == ("hello", USER_TOKEN, URL_TOKEN)


class TestLexicon:
    def test_load_disjoint_sets(self, tmp_path):
        (tmp_path / "p.txt").write_text("good\ngreat\n")
        (tmp_path / "n.txt").write_text("bad\n")
        lex = load_lexicon(tmp_path / "p.txt", tmp_path / "n.txt")
        assert lex.positive_words == {"good", "great"}
        assert lex.negative_words == {"bad"}

    def test_overlap_dropped_from_both_with_warning(self, tmp_path, caplog):
        (tmp_path / "p.txt").write_text("good\nodd\n")
        (tmp_path / "n.txt").write_text("bad\nodd\n")
        with caplog.at_level("WARNING"):
            lex = load_lexicon(tmp_path / "p.txt", tmp_path / "n.txt")
        assert "odd" not in lex.positive_words and "odd" not in lex.negative_words
        assert any("both polarity" in r.message for r in caplog.records)

    def test_save_load_round_trip(self, tmp_path):
        (tmp_path / "p.txt").write_text("good\n")
        (tmp_path / "n.txt").write_text("bad\nworse\n")
        lex = load_lexicon(tmp_path / "p.txt", tmp_path / "n.txt")
        save_lexicon(lex, tmp_path / "p2.txt", tmp_path / "n2.txt")
        again = load_lexicon(tmp_path / "p2.txt", tmp_path / "n2.txt")
        assert again == lex


class TestWordEmbeddings:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        table = WordEmbeddingTable(
            dimension=5,
            vectors={w: rng.normal(size=5).astype(np.float32) for w in ("a", "b")},
        )
        path = tmp_path / "w.vec"
        save_word_embeddings(table, path)
        loaded = load_word_embeddings(path)
        assert loaded.dimension == 5
        for w in table.vectors:
            np.testing.assert_array_equal(loaded.vectors[w], table.vectors[w])
