"""Deterministic random-stream derivation.

Every stochastic component of the pipeline draws from its own stream,
derived from (global seed, component name, stream index). Streams are
stable across platforms and independent of scheduling, so any component
can be re-run or parallelized without perturbing the others.
"""

from __future__ import annotations

import hashlib

import numpy as np

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


def derive_rng(seed: int, component: str, index: int = 0) -> np.random.Generator:
    """Return the generator for stream ``index`` of ``component``.

    The component name is hashed with SHA-256 (not Python's salted
    ``hash``) so streams are reproducible across processes.
    """
    if index < 0:
        raise ValueError(f"stream index must be nonnegative, got {index}")
    tag = int.from_bytes(hashlib.sha256(component.encode("utf-8")).digest()[:8], "little")
    return np.random.default_rng(np.random.SeedSequence([seed & _SEED_MASK, tag, index]))
