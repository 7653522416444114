"""Bigram convolutional sentence classifier with exact handwritten gradients.

The forward pass maps token vectors h_1..h_n to bigram feature rows
c_i = tanh(W_left h_i + W_right h_{i+1} + b), max-pools the rows into a
sentence vector s, and applies a multiclass logistic head. The backward
pass routes the pooling gradient only to argmax rows (ties to the lowest
row index) and leaves word embeddings untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Document, WordEmbeddingTable


@dataclass
class BasisModelParams:
    """One basis classifier's parameters.

    conv_left, conv_right: (num_filters, word_dim); conv_bias: (num_filters,);
    head_weight: (num_classes, num_filters); head_bias: (num_classes,).
    """

    conv_left: np.ndarray
    conv_right: np.ndarray
    conv_bias: np.ndarray
    head_weight: np.ndarray
    head_bias: np.ndarray

    @property
    def num_filters(self) -> int:
        return self.conv_left.shape[0]

    @property
    def word_dim(self) -> int:
        return self.conv_left.shape[1]

    @property
    def num_classes(self) -> int:
        return self.head_weight.shape[0]

    def copy(self) -> "BasisModelParams":
        return BasisModelParams(
            conv_left=self.conv_left.copy(),
            conv_right=self.conv_right.copy(),
            conv_bias=self.conv_bias.copy(),
            head_weight=self.head_weight.copy(),
            head_bias=self.head_bias.copy(),
        )


PARAM_FIELDS = ("conv_left", "conv_right", "conv_bias", "head_weight", "head_bias")

INIT_SCALE = 0.05


def init_basis_params(
    num_filters: int,
    word_dim: int,
    num_classes: int,
    rng: np.random.Generator,
    dtype=np.float32,
) -> BasisModelParams:
    """Weights uniform in (-0.05, 0.05), biases zero."""
    def draw(*shape):
        return rng.uniform(-INIT_SCALE, INIT_SCALE, size=shape).astype(dtype)

    return BasisModelParams(
        conv_left=draw(num_filters, word_dim),
        conv_right=draw(num_filters, word_dim),
        conv_bias=np.zeros(num_filters, dtype=dtype),
        head_weight=draw(num_classes, num_filters),
        head_bias=np.zeros(num_classes, dtype=dtype),
    )


def embed_tokens(doc: Document, table: WordEmbeddingTable, dtype=None) -> np.ndarray:
    """Stack in-vocabulary token vectors into an (n, word_dim) matrix.

    Out-of-vocabulary tokens are skipped; if fewer than 2 rows remain the
    matrix is padded with zero rows up to 2 so the bigram filter applies.
    """
    rows = [table.vectors[tok] for tok in doc.tokens if tok in table.vectors]
    if dtype is None:
        dtype = rows[0].dtype if rows else np.float32
    while len(rows) < 2:
        rows.append(np.zeros(table.dimension, dtype=dtype))
    return np.stack(rows).astype(dtype)


def conv_forward(x: np.ndarray, p: BasisModelParams) -> np.ndarray:
    """Bigram feature rows: row i is tanh(W_left h_i + W_right h_{i+1} + b)."""
    if x.shape[0] < 2:
        raise ValueError(f"bigram convolution needs at least 2 token rows, got {x.shape[0]}")
    pre = x[:-1] @ p.conv_left.T + x[1:] @ p.conv_right.T + p.conv_bias
    return np.tanh(pre)


def max_pool(c: np.ndarray) -> np.ndarray:
    """Componentwise maximum over feature rows."""
    if c.shape[0] < 1:
        raise ValueError("max pooling needs at least one row")
    return c.max(axis=0)


def class_probs(s: np.ndarray, p: BasisModelParams) -> np.ndarray:
    """Softmax over the logistic head's logits, max-subtracted for stability."""
    logits = p.head_weight @ s + p.head_bias
    shifted = logits - logits.max()
    expd = np.exp(shifted)
    return expd / expd.sum()


@dataclass
class ForwardCache:
    """Intermediates needed to backpropagate through one forward pass."""

    x: np.ndarray
    conv: np.ndarray
    argmax_rows: np.ndarray
    pooled: np.ndarray
    probs: np.ndarray


def basis_forward_matrix(x: np.ndarray, p: BasisModelParams) -> tuple[np.ndarray, ForwardCache]:
    """Forward pass from an already-embedded sentence matrix."""
    conv = conv_forward(x, p)
    argmax_rows = conv.argmax(axis=0)
    pooled = conv[argmax_rows, np.arange(conv.shape[1])]
    probs = class_probs(pooled, p)
    return probs, ForwardCache(x=x, conv=conv, argmax_rows=argmax_rows, pooled=pooled, probs=probs)


def basis_forward(
    doc: Document, table: WordEmbeddingTable, p: BasisModelParams
) -> tuple[np.ndarray, ForwardCache]:
    """Embed, convolve, pool, classify; returns (probs, cache)."""
    return basis_forward_matrix(embed_tokens(doc, table, dtype=p.conv_left.dtype), p)


def softmax_backward(probs: np.ndarray, grad_probs: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. softmax logits given the gradient w.r.t. its outputs."""
    return probs * (grad_probs - float(grad_probs @ probs))


def basis_backward(cache: ForwardCache, grad_probs: np.ndarray, p: BasisModelParams) -> dict:
    """Exact parameter gradients for one forward pass.

    ``grad_probs`` is the upstream gradient w.r.t. the output probabilities.
    Pooling gradient reaches only each filter's argmax row; word embeddings
    receive no gradient.
    """
    dlogits = softmax_backward(cache.probs, grad_probs)
    d_head_weight = np.outer(dlogits, cache.pooled)
    d_head_bias = dlogits
    ds = p.head_weight.T @ dlogits
    dconv = np.zeros_like(cache.conv)
    cols = np.arange(cache.conv.shape[1])
    dconv[cache.argmax_rows, cols] = ds
    dpre = dconv * (1.0 - cache.conv**2)
    return {
        "conv_left": dpre.T @ cache.x[:-1],
        "conv_right": dpre.T @ cache.x[1:],
        "conv_bias": dpre.sum(axis=0),
        "head_weight": d_head_weight,
        "head_bias": d_head_bias,
    }


__all__ = [
    "BasisModelParams",
    "ForwardCache",
    "INIT_SCALE",
    "PARAM_FIELDS",
    "basis_backward",
    "basis_forward",
    "basis_forward_matrix",
    "class_probs",
    "conv_forward",
    "embed_tokens",
    "init_basis_params",
    "max_pool",
    "softmax_backward",
]
