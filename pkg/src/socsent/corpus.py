"""Corpus, lexicon, and word-embedding loading.

The corpus container format is a 4-column TSV: document id, author id,
label, raw text. Labels are exactly ``positive``, ``negative``, or
``neutral``. All loaders are pure functions of file contents and the
returned values are treated as immutable.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .vecio import VectorFormatError, read_vector_table, write_vector_table

logger = logging.getLogger(__name__)

POSITIVE = "positive"
NEGATIVE = "negative"
NEUTRAL = "neutral"
LABELS = (POSITIVE, NEGATIVE, NEUTRAL)

URL_TOKEN = "<url>"
USER_TOKEN = "<user>"


class CorpusFormatError(ValueError):
    """Raised when a corpus or lexicon file violates the expected format."""


@dataclass(frozen=True)
class Document:
    """A single labeled message: id, author, gold label, and tokens."""

    id: str
    author: str
    label: str
    tokens: tuple[str, ...]

    def __post_init__(self):
        if self.label not in LABELS:
            raise CorpusFormatError(f"unknown label {self.label!r} for document {self.id!r}")


@dataclass(frozen=True)
class LabeledCorpus:
    """An ordered collection of documents with per-class counts."""

    documents: tuple[Document, ...]
    class_counts: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)


@dataclass(frozen=True)
class SentimentLexicon:
    """Disjoint positive/negative word sets."""

    positive_words: frozenset[str]
    negative_words: frozenset[str]


@dataclass
class WordEmbeddingTable:
    """Fixed word vectors; every vector has length ``dimension``."""

    dimension: int
    vectors: dict[str, np.ndarray]


def tokenize(text: str) -> list[str]:
    """Lowercase whitespace tokenization with URL/user-mention sentinels.

    Tokens starting with ``http://`` or ``https://`` (after lowercasing)
    become ``<url>``; tokens starting with ``@`` followed by at least one
    character become ``<user>``. Deterministic, and idempotent on its own
    output joined by spaces.
    """
    tokens = []
    for raw in text.split():
        tok = raw.lower()
        if tok.startswith("http://") or tok.startswith("https://"):
            tok = URL_TOKEN
        elif tok.startswith("@") and len(tok) > 1:
            tok = USER_TOKEN
        tokens.append(tok)
    return tokens


def make_corpus(documents) -> LabeledCorpus:
    """Build a corpus from documents, computing class counts and checking id uniqueness."""
    docs = tuple(documents)
    counts = Counter(doc.label for doc in docs)
    seen: set[str] = set()
    for doc in docs:
        if doc.id in seen:
            raise CorpusFormatError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)
    return LabeledCorpus(documents=docs, class_counts={label: counts.get(label, 0) for label in LABELS})


def load_corpus(path: str | Path) -> LabeledCorpus:
    """Load a 4-column TSV corpus (id, author, label, text); text is tokenized."""
    path = Path(path)
    documents = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise CorpusFormatError(f"{path}: line {lineno} has {len(fields)} fields, expected 4")
            doc_id, author, label, text = fields
            if label not in LABELS:
                raise CorpusFormatError(f"{path}: line {lineno} has unknown label {label!r}")
            documents.append(Document(id=doc_id, author=author, label=label, tokens=tuple(tokenize(text))))
    try:
        return make_corpus(documents)
    except CorpusFormatError as exc:
        raise CorpusFormatError(f"{path}: {exc}") from exc


def save_corpus(corpus: LabeledCorpus, path: str | Path) -> None:
    """Write a corpus back to 4-column TSV; round-trips through :func:`load_corpus`."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            fh.write(f"{doc.id}\t{doc.author}\t{doc.label}\t{' '.join(doc.tokens)}\n")


def load_lexicon(pos_path: str | Path, neg_path: str | Path) -> SentimentLexicon:
    """Load one-word-per-line polarity files into a disjoint lexicon.

    A word appearing in both files is dropped from both, with a warning:
    downstream classification needs a deterministic polarity per word.
    """
    pos = _read_word_set(pos_path)
    neg = _read_word_set(neg_path)
    overlap = pos & neg
    if overlap:
        logger.warning(
            "%d word(s) appear in both polarity files and were dropped: %s",
            len(overlap),
            ", ".join(sorted(overlap)[:10]),
        )
    return SentimentLexicon(positive_words=frozenset(pos - overlap), negative_words=frozenset(neg - overlap))


def _read_word_set(path: str | Path) -> set[str]:
    with Path(path).open("r", encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip()}


def save_lexicon(lex: SentimentLexicon, pos_path: str | Path, neg_path: str | Path) -> None:
    """Write the polarity word sets, one word per line, sorted."""
    for words, path in ((lex.positive_words, pos_path), (lex.negative_words, neg_path)):
        with Path(path).open("w", encoding="utf-8") as fh:
            for word in sorted(words):
                fh.write(word + "\n")


def load_word_embeddings(path: str | Path, dtype=np.float32) -> WordEmbeddingTable:
    """Load a word2vec-text-format table ('V D' header, then 'word v1 ... vD' rows)."""
    dim, vectors = read_vector_table(path, dtype=dtype)
    return WordEmbeddingTable(dimension=dim, vectors=vectors)


def save_word_embeddings(table: WordEmbeddingTable, path: str | Path) -> None:
    write_vector_table(path, table.dimension, table.vectors)


__all__ = [
    "CorpusFormatError",
    "Document",
    "LABELS",
    "LabeledCorpus",
    "NEGATIVE",
    "NEUTRAL",
    "POSITIVE",
    "SentimentLexicon",
    "URL_TOKEN",
    "USER_TOKEN",
    "VectorFormatError",
    "WordEmbeddingTable",
    "load_corpus",
    "load_lexicon",
    "load_word_embeddings",
    "make_corpus",
    "save_corpus",
    "save_lexicon",
    "save_word_embeddings",
    "tokenize",
]
