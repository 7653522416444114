"""Mixture of basis classifiers gated by author information.

The main configuration gates K basis CNNs with a softmax over linear
functions of the author's network embedding. Ablation modes swap the gate
input (random author vectors, bag-of-word-vectors) or bypass the mixture
entirely (single CNN, CNN with the author vector concatenated before the
classifier head).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .cnn import (
    PARAM_FIELDS,
    BasisModelParams,
    basis_forward_matrix,
    conv_forward,
    embed_tokens,
    init_basis_params,
)
from .corpus import LABELS, Document, WordEmbeddingTable
from .embeddings import NodeEmbeddingTable

logger = logging.getLogger(__name__)

MODE_SOCIAL = "social"
MODE_RANDOM = "random"
MODE_MOE = "moe"
MODE_CONCAT = "concat"
MODE_SINGLE = "single"
MODES = (MODE_SOCIAL, MODE_RANDOM, MODE_MOE, MODE_CONCAT, MODE_SINGLE)

ATTENTION_MODES = (MODE_SOCIAL, MODE_RANDOM)
SINGLE_BASIS_MODES = (MODE_CONCAT, MODE_SINGLE)

_WARNED_UNKNOWN_AUTHORS: set[str] = set()


def warn_unknown_author(author: str) -> None:
    """Log the missing-embedding fallback once per author per process."""
    if author not in _WARNED_UNKNOWN_AUTHORS:
        _WARNED_UNKNOWN_AUTHORS.add(author)
        logger.warning("author %r has no embedding, falling back", author)


@dataclass
class AttentionParams:
    """Per-basis gate: score_k = weight[k] . v_author + bias[k]."""

    weight: np.ndarray
    bias: np.ndarray


@dataclass
class MoeGateParams:
    """Text-only gate: scores from the sum of in-vocabulary word vectors."""

    weight: np.ndarray
    bias: np.ndarray


@dataclass
class ConcatParams:
    """Classifier head over [pooled sentence ; author vector]."""

    weight: np.ndarray
    bias: np.ndarray


def _stable_softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    expd = np.exp(shifted)
    return expd / expd.sum()


@dataclass
class SocialAttentionModel:
    """K basis classifiers plus the gate (or head) for the active mode.

    Word and author tables are frozen; only basis, attention, moe, and
    concat parameters are trainable.
    """

    mode: str
    bases: list[BasisModelParams]
    classes: tuple[str, ...]
    word_table: WordEmbeddingTable
    author_table: NodeEmbeddingTable | None = None
    attention: AttentionParams | None = None
    moe: MoeGateParams | None = None
    concat: ConcatParams | None = None

    @property
    def num_bases(self) -> int:
        return len(self.bases)

    def trainable_parameters(self) -> dict[str, np.ndarray]:
        """Name -> live tensor map; in-place writes update the model."""
        params: dict[str, np.ndarray] = {}
        for k, basis in enumerate(self.bases):
            for field_name in PARAM_FIELDS:
                params[f"basis.{k}.{field_name}"] = getattr(basis, field_name)
        if self.mode in ATTENTION_MODES:
            params["attention.weight"] = self.attention.weight
            params["attention.bias"] = self.attention.bias
        elif self.mode == MODE_MOE:
            params["moe.weight"] = self.moe.weight
            params["moe.bias"] = self.moe.bias
        elif self.mode == MODE_CONCAT:
            params["concat.weight"] = self.concat.weight
            params["concat.bias"] = self.concat.bias
        return params

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: arr.copy() for name, arr in self.trainable_parameters().items()}

    def restore(self, snapshot: dict[str, np.ndarray]) -> None:
        for name, arr in self.trainable_parameters().items():
            arr[...] = snapshot[name]


def init_model(
    mode: str,
    num_bases: int,
    num_filters: int,
    word_table: WordEmbeddingTable,
    author_table: NodeEmbeddingTable | None,
    rng: np.random.Generator,
    classes: tuple[str, ...] = LABELS,
    dtype=np.float32,
) -> SocialAttentionModel:
    """Build a model for the given mode; single-basis modes force K=1.

    Attention starts at zero (uniform gate) and is normally overwritten by
    pretraining. Gate and concat-head weights use the same small uniform
    init as the basis classifiers.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    if mode in SINGLE_BASIS_MODES and num_bases != 1:
        logger.warning("mode=%s uses a single basis model, overriding K=%d", mode, num_bases)
        num_bases = 1
    if num_bases < 1:
        raise ValueError(f"need at least one basis model, got {num_bases}")
    if mode in ATTENTION_MODES or mode == MODE_CONCAT:
        if author_table is None:
            raise ValueError(f"mode={mode} requires an author embedding table")

    word_dim = word_table.dimension
    num_classes = len(classes)
    bases = [
        init_basis_params(num_filters, word_dim, num_classes, rng, dtype=dtype)
        for _ in range(num_bases)
    ]
    model = SocialAttentionModel(
        mode=mode, bases=bases, classes=tuple(classes),
        word_table=word_table, author_table=author_table,
    )
    if mode in ATTENTION_MODES:
        model.attention = AttentionParams(
            weight=np.zeros((num_bases, author_table.dimension), dtype=dtype),
            bias=np.zeros(num_bases, dtype=dtype),
        )
    elif mode == MODE_MOE:
        model.moe = MoeGateParams(
            weight=rng.uniform(-0.05, 0.05, size=(num_bases, word_dim)).astype(dtype),
            bias=np.zeros(num_bases, dtype=dtype),
        )
    elif mode == MODE_CONCAT:
        model.concat = ConcatParams(
            weight=rng.uniform(
                -0.05, 0.05, size=(num_classes, num_filters + author_table.dimension)
            ).astype(dtype),
            bias=np.zeros(num_classes, dtype=dtype),
        )
    return model


def random_attention_embeddings(
    authors, dimension: int, rng: np.random.Generator
) -> NodeEmbeddingTable:
    """One frozen uniform(-0.25, 0.25) vector per author, in sorted author order."""
    vectors = {
        author: rng.uniform(-0.25, 0.25, size=dimension).astype(np.float32)
        for author in sorted(authors)
    }
    return NodeEmbeddingTable(dimension=dimension, vectors=vectors)


def attention_weights(author: str, model: SocialAttentionModel) -> np.ndarray:
    """Gate distribution over basis models for this author.

    Authors without an embedding get the uniform distribution.
    """
    if model.mode not in ATTENTION_MODES:
        raise ValueError(f"attention weights undefined for mode {model.mode!r}")
    k = model.num_bases
    if author not in model.author_table:
        warn_unknown_author(author)
        return np.full(k, 1.0 / k, dtype=model.attention.weight.dtype)
    v = model.author_table[author]
    scores = model.attention.weight @ v + model.attention.bias
    return _stable_softmax(scores)


def bag_of_vectors(doc: Document, table: WordEmbeddingTable, dtype=np.float32) -> np.ndarray:
    """Sum of in-vocabulary word vectors; zero vector if all tokens are OOV."""
    total = np.zeros(table.dimension, dtype=dtype)
    for tok in doc.tokens:
        vec = table.vectors.get(tok)
        if vec is not None:
            total = total + vec.astype(dtype)
    return total


def moe_gate(doc: Document, gate: MoeGateParams, table: WordEmbeddingTable) -> np.ndarray:
    """Gate distribution from the document's summed word vectors."""
    sent = bag_of_vectors(doc, table, dtype=gate.weight.dtype)
    return _stable_softmax(gate.weight @ sent + gate.bias)


def gate_distribution(doc: Document, author: str, model: SocialAttentionModel) -> np.ndarray:
    """The active mode's mixing distribution over basis models."""
    if model.mode in ATTENTION_MODES:
        return attention_weights(author, model)
    if model.mode == MODE_MOE:
        return moe_gate(doc, model.moe, model.word_table)
    if model.mode == MODE_SINGLE:
        return np.ones(1, dtype=model.bases[0].conv_left.dtype)
    raise ValueError(f"mode {model.mode!r} has no mixture gate")


def mixture_predict(doc: Document, author: str, model: SocialAttentionModel) -> np.ndarray:
    """Convex combination of the basis class probabilities under the gate."""
    gate = gate_distribution(doc, author, model)
    x = embed_tokens(doc, model.word_table, dtype=model.bases[0].conv_left.dtype)
    mixed = None
    for k, basis in enumerate(model.bases):
        probs, _ = basis_forward_matrix(x, basis)
        term = gate[k] * probs
        mixed = term if mixed is None else mixed + term
    return mixed


def concat_forward(doc: Document, author: str, model: SocialAttentionModel) -> np.ndarray:
    """Softmax head over pooled sentence features joined with the author vector.

    Unknown authors contribute a zero vector.
    """
    if model.mode != MODE_CONCAT:
        raise ValueError(f"concat prediction undefined for mode {model.mode!r}")
    basis = model.bases[0]
    dtype = basis.conv_left.dtype
    x = embed_tokens(doc, model.word_table, dtype=dtype)
    pooled = conv_forward(x, basis).max(axis=0)
    if author in model.author_table:
        v = model.author_table[author].astype(dtype)
    else:
        warn_unknown_author(author)
        v = np.zeros(model.author_table.dimension, dtype=dtype)
    z = np.concatenate([pooled, v])
    return _stable_softmax(model.concat.weight @ z + model.concat.bias)


def predict_proba(doc: Document, author: str, model: SocialAttentionModel) -> np.ndarray:
    """Class probabilities under the active mode, ordered by model.classes."""
    if model.mode == MODE_CONCAT:
        return concat_forward(doc, author, model)
    return mixture_predict(doc, author, model)


def predict_label(doc: Document, author: str, model: SocialAttentionModel) -> str:
    """Most probable class; exact ties go to the lowest class index."""
    probs = predict_proba(doc, author, model)
    return model.classes[int(np.argmax(probs))]


__all__ = [
    "ATTENTION_MODES",
    "AttentionParams",
    "ConcatParams",
    "MODES",
    "MODE_CONCAT",
    "MODE_MOE",
    "MODE_RANDOM",
    "MODE_SINGLE",
    "MODE_SOCIAL",
    "MoeGateParams",
    "SINGLE_BASIS_MODES",
    "SocialAttentionModel",
    "attention_weights",
    "bag_of_vectors",
    "concat_forward",
    "gate_distribution",
    "init_model",
    "mixture_predict",
    "moe_gate",
    "predict_label",
    "predict_proba",
]
