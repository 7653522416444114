"""Undirected simple graphs over author ids, with degree-preserving rewiring.

Graphs are immutable after construction; rewiring returns a new graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

Edge = tuple[str, str]


class GraphFormatError(ValueError):
    """Raised for malformed edge-list files."""


def _ordered(u: str, v: str) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class SocialGraph:
    """Simple undirected graph: no self-loops, no parallel edges.

    ``nodes`` is sorted; every edge is stored as an ordered pair with the
    smaller endpoint first.
    """

    nodes: tuple[str, ...]
    edges: frozenset[Edge]

    @classmethod
    def from_edges(cls, edges, extra_nodes=()) -> "SocialGraph":
        """Build a graph from (u, v) pairs; ``extra_nodes`` adds isolated nodes."""
        edge_set: set[Edge] = set()
        node_set: set[str] = set(extra_nodes)
        for u, v in edges:
            if u == v:
                raise GraphFormatError(f"self-loop on node {u!r}")
            edge_set.add(_ordered(u, v))
            node_set.add(u)
            node_set.add(v)
        return cls(nodes=tuple(sorted(node_set)), edges=frozenset(edge_set))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree_map(self) -> dict[str, int]:
        degrees = {node: 0 for node in self.nodes}
        for u, v in self.edges:
            degrees[u] += 1
            degrees[v] += 1
        return degrees


def load_edge_list(path: str | Path) -> SocialGraph:
    """Load a whitespace-separated edge list; '#' lines are comments.

    Duplicate and reversed-duplicate lines collapse to one edge. Blank
    lines are skipped. A line with other than two fields, or a self-loop
    line, raises :class:`GraphFormatError` naming the line number.
    """
    path = Path(path)
    edges = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) != 2:
                raise GraphFormatError(f"{path}: line {lineno} has {len(fields)} fields, expected 2")
            u, v = fields
            if u == v:
                raise GraphFormatError(f"{path}: line {lineno} is a self-loop on {u!r}")
            edges.append((u, v))
    return SocialGraph.from_edges(edges)


def save_edge_list(g: SocialGraph, path: str | Path) -> None:
    """Write edges one per line in sorted order (isolated nodes are not representable)."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for u, v in sorted(g.edges):
            fh.write(f"{u} {v}\n")


def degree_sequence(g: SocialGraph) -> tuple[int, ...]:
    """Degree multiset in canonical (sorted) form; one entry per node."""
    return tuple(sorted(g.degree_map().values()))


def double_edge_swap_epoch(g: SocialGraph, rng: np.random.Generator) -> SocialGraph:
    """One rewiring epoch: exactly ``|edges|`` degree-preserving swap attempts.

    Each attempt picks two distinct edges uniformly, orients each endpoint
    pair uniformly at random, and proposes replacing (u,v),(x,y) with
    (u,x),(v,y). Attempts that would create a self-loop or a parallel edge
    are discarded, leaving the edges unchanged; discarded attempts still
    count toward the epoch. Node set and degree sequence are preserved.
    """
    m = g.num_edges
    if m < 2:
        raise ValueError(f"rewiring needs at least 2 edges, graph has {m}")
    edges = sorted(g.edges)
    edge_set = set(edges)
    for _ in range(m):
        i = int(rng.integers(m))
        j = int(rng.integers(m - 1))
        if j >= i:
            j += 1
        u, v = edges[i]
        x, y = edges[j]
        if int(rng.integers(2)):
            u, v = v, u
        if int(rng.integers(2)):
            x, y = y, x
        if u == x or v == y:
            continue
        new_a = _ordered(u, x)
        new_b = _ordered(v, y)
        if new_a in edge_set or new_b in edge_set:
            continue
        edge_set.remove(edges[i])
        edge_set.remove(edges[j])
        edge_set.add(new_a)
        edge_set.add(new_b)
        edges[i] = new_a
        edges[j] = new_b
    return SocialGraph(nodes=g.nodes, edges=frozenset(edge_set))


def edge_overlap(g1: SocialGraph, g2: SocialGraph) -> float:
    """Fraction of g1's edges that also occur in g2."""
    if g1.num_edges == 0:
        raise ValueError("edge overlap is undefined for an empty first graph")
    return len(g1.edges & g2.edges) / g1.num_edges


__all__ = [
    "Edge",
    "GraphFormatError",
    "SocialGraph",
    "degree_sequence",
    "double_edge_swap_epoch",
    "edge_overlap",
    "load_edge_list",
    "save_edge_list",
]
