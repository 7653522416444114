"""First-order node embeddings trained on the social graph alone.

Each node gets one vector; vectors of linked nodes are pulled together and
vectors of noise-sampled node pairs pushed apart, by stochastic gradient
ascent on a per-edge negative-sampling objective:

    log sigmoid(v_i . v_j) + sum_n log sigmoid(-v_i . v_n)

with negatives n drawn from a degree-biased noise distribution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import SocialGraph
from .vecio import read_vector_table, write_vector_table

logger = logging.getLogger(__name__)

LR_FLOOR = 1e-4


@dataclass(frozen=True)
class LineConfig:
    dimension: int = 100
    negative_samples: int = 5
    learning_rate: float = 0.025
    epochs: int = 5
    noise_exponent: float = 0.75

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.negative_samples < 1:
            raise ValueError(f"negative_samples must be >= 1, got {self.negative_samples}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


@dataclass(frozen=True)
class NodeEmbeddingTable:
    """Author-id to vector map; every vector has length ``dimension``."""

    dimension: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, author: str) -> bool:
        return author in self.vectors

    def __getitem__(self, author: str) -> np.ndarray:
        return self.vectors[author]


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def noise_distribution(g: SocialGraph, exponent: float) -> np.ndarray:
    """Negative-sampling noise over ``g.nodes``: p(n) proportional to degree^exponent.

    Isolated nodes get probability zero for every exponent, so exponent 0
    is uniform over the nodes that touch at least one edge.
    """
    if g.num_edges == 0:
        raise ValueError("noise distribution needs a graph with at least one edge")
    degrees = g.degree_map()
    weights = np.array(
        [float(degrees[n]) ** exponent if degrees[n] > 0 else 0.0 for n in g.nodes],
        dtype=np.float64,
    )
    return weights / weights.sum()


def init_node_vectors(nodes, dimension: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Uniform init in (-0.5/D, 0.5/D), one draw per node in the given order."""
    half = 0.5 / dimension
    return {
        node: rng.uniform(-half, half, size=dimension).astype(np.float32) for node in nodes
    }


def edge_objective(v_i: np.ndarray, v_j: np.ndarray, v_negs: np.ndarray):
    """Per-edge objective value and its gradients.

    ``v_negs`` is a (num_negatives, D) matrix; returns
    (value, grad_i, grad_j, grad_negs). Gradients are of the objective
    itself, so ascent means adding them.
    """
    sig_pos = _sigmoid(float(v_i @ v_j))
    neg_scores = v_negs @ v_i if len(v_negs) else np.zeros(0, dtype=v_i.dtype)
    sig_negs = _sigmoid(neg_scores)
    value = float(np.log(sig_pos) + np.sum(np.log1p(-sig_negs)))
    grad_i = (1.0 - sig_pos) * v_j - (sig_negs[:, None] * v_negs).sum(axis=0)
    grad_j = (1.0 - sig_pos) * v_i
    grad_negs = -sig_negs[:, None] * v_i
    return value, grad_i, grad_j, grad_negs


def train_line_embeddings(
    g: SocialGraph, cfg: LineConfig, rng: np.random.Generator
) -> NodeEmbeddingTable:
    """SGD on the per-edge objective; one epoch is ``|edges|`` sampled edges.

    Each step samples an edge uniformly, flips its orientation uniformly,
    and draws ``negative_samples`` noise nodes; noise draws that hit either
    edge endpoint are skipped for that step. The learning rate decays
    linearly from ``cfg.learning_rate`` to 1e-4 over all steps. Isolated
    nodes keep their random initialization.
    """
    if g.num_edges == 0:
        raise ValueError("embedding training needs a graph with at least one edge")
    vectors = init_node_vectors(g.nodes, cfg.dimension, rng)
    isolated = [n for n, d in g.degree_map().items() if d == 0]
    if isolated:
        logger.warning("%d isolated nodes keep their random initialization", len(isolated))

    edges = sorted(g.edges)
    num_edges = len(edges)
    num_nodes = len(g.nodes)
    noise = noise_distribution(g, cfg.noise_exponent)
    total_steps = cfg.epochs * num_edges
    lr0 = cfg.learning_rate

    for step in range(total_steps):
        frac = step / total_steps
        lr = max(lr0 * (1.0 - frac) + LR_FLOOR * frac, LR_FLOOR)
        i_name, j_name = edges[int(rng.integers(num_edges))]
        if int(rng.integers(2)):
            i_name, j_name = j_name, i_name
        neg_idx = rng.choice(num_nodes, size=cfg.negative_samples, p=noise)

        v_i = vectors[i_name]
        v_j = vectors[j_name]
        sig_pos = _sigmoid(float(v_i @ v_j))
        accum = (1.0 - sig_pos) * v_j
        vectors[j_name] = v_j + np.float32(lr * (1.0 - sig_pos)) * v_i
        for idx in neg_idx:
            n_name = g.nodes[int(idx)]
            if n_name == i_name or n_name == j_name:
                continue
            v_n = vectors[n_name]
            sig_neg = _sigmoid(float(v_i @ v_n))
            accum = accum - sig_neg * v_n
            vectors[n_name] = v_n - np.float32(lr * sig_neg) * v_i
        vectors[i_name] = v_i + np.float32(lr) * accum.astype(np.float32)

    return NodeEmbeddingTable(dimension=cfg.dimension, vectors=vectors)


def estimate_objective(t: NodeEmbeddingTable, g: SocialGraph, cfg: LineConfig) -> float:
    """Mean per-edge objective with the negative term taken in expectation.

    Deterministic: instead of sampling negatives the noise distribution is
    summed exactly, weighted by the configured number of negative samples.
    """
    if g.num_edges == 0:
        raise ValueError("objective needs a graph with at least one edge")
    noise = noise_distribution(g, cfg.noise_exponent)
    node_mat = np.stack([t.vectors[n].astype(np.float64) for n in g.nodes])
    total = 0.0
    for u, v in sorted(g.edges):
        v_u = t.vectors[u].astype(np.float64)
        v_v = t.vectors[v].astype(np.float64)
        pos = float(np.log(_sigmoid(v_u @ v_v)))
        neg = float(noise @ np.log(_sigmoid(-(node_mat @ v_u))))
        total += pos + cfg.negative_samples * neg
    return total / g.num_edges


def save_embeddings(t: NodeEmbeddingTable, path: str | Path) -> None:
    write_vector_table(path, t.dimension, t.vectors)


def load_embeddings(path: str | Path) -> NodeEmbeddingTable:
    dimension, vectors = read_vector_table(path, dtype=np.float32)
    return NodeEmbeddingTable(dimension=dimension, vectors=vectors)


__all__ = [
    "LR_FLOOR",
    "LineConfig",
    "NodeEmbeddingTable",
    "edge_objective",
    "estimate_objective",
    "init_node_vectors",
    "load_embeddings",
    "noise_distribution",
    "save_embeddings",
    "train_line_embeddings",
]
