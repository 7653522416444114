"""Planted-community benchmark: a graph plus a corpus with polarity-flip words.

Two author communities are wired as a planted two-block random graph.
Messages are built from a synthetic vocabulary of positive and negative
words. Designated flip words keep their base polarity in community 0 and
invert it in community 1, so a message's gold label is a function of its
tokens AND its author's community. Plain messages use one polarity only
and are decidable from text alone.

Author ids encode the community ("c0a017" lives in community 0), making
every document's label recomputable from the document itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import (
    NEGATIVE,
    POSITIVE,
    Document,
    LabeledCorpus,
    SentimentLexicon,
    WordEmbeddingTable,
    make_corpus,
)
from .graph import SocialGraph
from .rng import derive_rng

POSITIVE_PREFIX = "pos"
NEGATIVE_PREFIX = "neg"


@dataclass(frozen=True)
class SynthConfig:
    nodes_per_community: int = 100
    intra_edge_prob: float = 0.1
    inter_edge_prob: float = 0.005
    flip_words: tuple[str, ...] = ("pos00", "neg00")
    docs_per_author: int = 5
    vocab_size: int = 24
    word_dim: int = 16
    flip_doc_fraction: float = 0.4
    seed: int = 0

    def __post_init__(self):
        for name in ("intra_edge_prob", "inter_edge_prob"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{name} must lie in [0,1], got {p}")
        if not (0.0 <= self.flip_doc_fraction <= 1.0):
            raise ValueError(f"flip_doc_fraction must lie in [0,1], got {self.flip_doc_fraction}")
        if self.nodes_per_community < 2:
            raise ValueError("need at least 2 nodes per community")
        if self.docs_per_author < 1:
            raise ValueError("need at least 1 document per author")
        if self.vocab_size < 4 or self.vocab_size % 2:
            raise ValueError(f"vocab_size must be an even number >= 4, got {self.vocab_size}")
        if self.word_dim < 1:
            raise ValueError("word_dim must be positive")
        vocab = set(vocabulary(self.vocab_size))
        unknown = [w for w in self.flip_words if w not in vocab]
        if unknown:
            raise ValueError(f"flip words {unknown} are not in the vocabulary")


def vocabulary(vocab_size: int) -> list[str]:
    """Half positive, half negative word names, in a fixed order."""
    half = vocab_size // 2
    return [f"{POSITIVE_PREFIX}{i:02d}" for i in range(half)] + [
        f"{NEGATIVE_PREFIX}{i:02d}" for i in range(half)
    ]


def author_id(community: int, index: int) -> str:
    return f"c{community}a{index:03d}"


def author_community(author: str) -> int:
    """Recover the community an author id encodes."""
    if len(author) < 2 or author[0] != "c" or not author[1].isdigit():
        raise ValueError(f"author id {author!r} does not encode a community")
    return int(author[1])


def word_base_polarity(word: str) -> int:
    if word.startswith(POSITIVE_PREFIX):
        return 1
    if word.startswith(NEGATIVE_PREFIX):
        return -1
    raise ValueError(f"word {word!r} carries no polarity prefix")


def gold_label(tokens, community: int, flip_words) -> str:
    """Majority polarity of the tokens, flip words inverted in community 1."""
    flip_set = set(flip_words)
    total = 0
    for tok in tokens:
        polarity = word_base_polarity(tok)
        if tok in flip_set and community == 1:
            polarity = -polarity
        total += polarity
    if total > 0:
        return POSITIVE
    if total < 0:
        return NEGATIVE
    raise ValueError(f"tokens {tokens!r} have no majority polarity")


def planted_two_block_graph(
    nodes_per_community: int,
    intra_edge_prob: float,
    inter_edge_prob: float,
    rng: np.random.Generator,
) -> SocialGraph:
    """Random graph with two equally sized communities of author nodes.

    Node pairs inside a community link with ``intra_edge_prob``, pairs
    across communities with ``inter_edge_prob``. Isolated nodes stay in
    the node set.
    """
    authors = [
        author_id(c, i) for c in range(2) for i in range(nodes_per_community)
    ]
    edges = []
    for a in range(len(authors)):
        for b in range(a + 1, len(authors)):
            same = author_community(authors[a]) == author_community(authors[b])
            p = intra_edge_prob if same else inter_edge_prob
            if rng.random() < p:
                edges.append((authors[a], authors[b]))
    return SocialGraph.from_edges(edges, extra_nodes=authors)


def community_correctness(
    authors, p_correct_by_community: tuple[float, float], rng: np.random.Generator
) -> dict[str, bool]:
    """Draw a correctness flag per author with community-dependent rates."""
    return {
        a: bool(rng.random() < p_correct_by_community[author_community(a)])
        for a in sorted(authors)
    }


@dataclass(frozen=True)
class SynthDataset:
    graph: SocialGraph
    train: LabeledCorpus
    dev: LabeledCorpus
    test: LabeledCorpus
    word_table: WordEmbeddingTable
    lexicon: SentimentLexicon
    config: SynthConfig = field(repr=False, default=None)


def _make_documents(author: str, cfg: SynthConfig, rng: np.random.Generator) -> list[Document]:
    community = author_community(author)
    vocab = vocabulary(cfg.vocab_size)
    flip_set = set(cfg.flip_words)
    pos_pool = [w for w in vocab if word_base_polarity(w) > 0 and w not in flip_set]
    neg_pool = [w for w in vocab if word_base_polarity(w) < 0 and w not in flip_set]
    n_flip = int(round(cfg.flip_doc_fraction * cfg.docs_per_author))

    docs = []
    for d in range(cfg.docs_per_author):
        if d < n_flip and cfg.flip_words:
            flip = cfg.flip_words[int(rng.integers(len(cfg.flip_words)))]
            words = [
                flip,
                pos_pool[int(rng.integers(len(pos_pool)))],
                neg_pool[int(rng.integers(len(neg_pool)))],
            ]
        else:
            pool = pos_pool if int(rng.integers(2)) else neg_pool
            length = 2 + int(rng.integers(3))
            words = [pool[int(rng.integers(len(pool)))] for _ in range(length)]
        order = rng.permutation(len(words))
        tokens = tuple(words[int(i)] for i in order)
        docs.append(
            Document(
                id=f"{author}-d{d}",
                author=author,
                label=gold_label(tokens, community, cfg.flip_words),
                tokens=tokens,
            )
        )
    return docs


def _split_authors(cfg: SynthConfig, rng: np.random.Generator):
    """70/10/20 author split, stratified by community."""
    train, dev, test = [], [], []
    for c in range(2):
        authors = [author_id(c, i) for i in range(cfg.nodes_per_community)]
        order = rng.permutation(len(authors))
        shuffled = [authors[int(i)] for i in order]
        n = len(shuffled)
        n_train = int(round(0.7 * n))
        n_dev = int(round(0.1 * n))
        train += shuffled[:n_train]
        dev += shuffled[n_train : n_train + n_dev]
        test += shuffled[n_train + n_dev :]
    return sorted(train), sorted(dev), sorted(test)


def generate(cfg: SynthConfig) -> SynthDataset:
    """Build the full benchmark: graph, split corpora, embeddings, lexicon.

    All randomness derives from ``cfg.seed``; repeated calls with the same
    config return identical datasets. Test authors contribute no training
    or development documents but do appear in the graph.
    """
    graph = planted_two_block_graph(
        cfg.nodes_per_community,
        cfg.intra_edge_prob,
        cfg.inter_edge_prob,
        derive_rng(cfg.seed, "synth-graph"),
    )
    doc_rng = derive_rng(cfg.seed, "synth-docs")
    docs_by_author = {
        author: _make_documents(author, cfg, doc_rng) for author in graph.nodes
    }
    train_authors, dev_authors, test_authors = _split_authors(
        cfg, derive_rng(cfg.seed, "synth-split")
    )

    def corpus_for(authors):
        return make_corpus(doc for a in authors for doc in docs_by_author[a])

    emb_rng = derive_rng(cfg.seed, "synth-embeddings")
    vocab = vocabulary(cfg.vocab_size)
    word_table = WordEmbeddingTable(
        dimension=cfg.word_dim,
        vectors={
            w: emb_rng.uniform(-0.25, 0.25, size=cfg.word_dim).astype(np.float32)
            for w in vocab
        },
    )
    lexicon = SentimentLexicon(
        positive_words=frozenset(w for w in vocab if word_base_polarity(w) > 0),
        negative_words=frozenset(w for w in vocab if word_base_polarity(w) < 0),
    )
    return SynthDataset(
        graph=graph,
        train=corpus_for(train_authors),
        dev=corpus_for(dev_authors),
        test=corpus_for(test_authors),
        word_table=word_table,
        lexicon=lexicon,
        config=cfg,
    )


__all__ = [
    "SynthConfig",
    "SynthDataset",
    "author_community",
    "author_id",
    "community_correctness",
    "generate",
    "gold_label",
    "planted_two_block_graph",
    "vocabulary",
    "word_base_polarity",
]
