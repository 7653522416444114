"""Self-describing model checkpoints: JSON with base64 tensor blocks.

Tensors are stored as little-endian row-major bytes with explicit dtype
and shape, so a load reproduces the saved model's predictions bit for
bit. Keys are sorted and separators fixed, so saving the same model twice
yields byte-identical files.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np

from .cnn import PARAM_FIELDS, BasisModelParams
from .corpus import WordEmbeddingTable
from .embeddings import NodeEmbeddingTable
from .model import (
    ATTENTION_MODES,
    MODE_CONCAT,
    MODE_MOE,
    AttentionParams,
    ConcatParams,
    MoeGateParams,
    SocialAttentionModel,
)

FORMAT_VERSION = 1

_DTYPE_CODES = {"float32": "<f4", "float64": "<f8"}


class CheckpointError(ValueError):
    """Raised for unreadable or inconsistent checkpoint files."""


def encode_tensor(arr: np.ndarray) -> dict:
    name = arr.dtype.name
    if name not in _DTYPE_CODES:
        raise CheckpointError(f"unsupported tensor dtype {name!r}")
    data = np.ascontiguousarray(arr).astype(_DTYPE_CODES[name], copy=False)
    return {
        "dtype": name,
        "shape": list(arr.shape),
        "data": base64.b64encode(data.tobytes()).decode("ascii"),
    }


def decode_tensor(obj: dict) -> np.ndarray:
    try:
        code = _DTYPE_CODES[obj["dtype"]]
        raw = base64.b64decode(obj["data"])
        arr = np.frombuffer(raw, dtype=code).reshape(obj["shape"])
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"malformed tensor block: {exc}") from exc
    return arr.astype(obj["dtype"]).copy()


def _encode_table(dimension: int, vectors: dict) -> dict:
    keys = sorted(vectors)
    if keys:
        matrix = np.stack([vectors[k] for k in keys])
    else:
        matrix = np.zeros((0, dimension), dtype=np.float32)
    return {"dimension": dimension, "keys": keys, "matrix": encode_tensor(matrix)}


def _decode_table(obj: dict) -> tuple[int, dict]:
    matrix = decode_tensor(obj["matrix"])
    keys = obj["keys"]
    if matrix.shape[0] != len(keys):
        raise CheckpointError(
            f"table has {len(keys)} keys but {matrix.shape[0]} vector rows"
        )
    return int(obj["dimension"]), {k: matrix[i] for i, k in enumerate(keys)}


def save_checkpoint(model: SocialAttentionModel, path: str | Path, config_echo: dict | None = None) -> None:
    """Serialize the model and an arbitrary JSON-safe config echo."""
    payload = {
        "format_version": FORMAT_VERSION,
        "config": config_echo or {},
        "mode": model.mode,
        "classes": list(model.classes),
        "num_bases": model.num_bases,
        "params": {name: encode_tensor(arr) for name, arr in model.trainable_parameters().items()},
        "word_table": _encode_table(model.word_table.dimension, model.word_table.vectors),
        "author_table": (
            _encode_table(model.author_table.dimension, model.author_table.vectors)
            if model.author_table is not None
            else None
        ),
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_checkpoint(path: str | Path) -> tuple[SocialAttentionModel, dict]:
    """Rebuild a model from a checkpoint; returns (model, config echo)."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{path}: not valid JSON: {exc}") from exc
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported format version {version!r}")

    params = {name: decode_tensor(obj) for name, obj in payload["params"].items()}
    mode = payload["mode"]
    num_bases = payload["num_bases"]
    bases = []
    for k in range(num_bases):
        fields = {}
        for field_name in PARAM_FIELDS:
            key = f"basis.{k}.{field_name}"
            if key not in params:
                raise CheckpointError(f"{path}: missing tensor {key!r}")
            fields[field_name] = params[key]
        bases.append(BasisModelParams(**fields))

    word_dim, word_vectors = _decode_table(payload["word_table"])
    word_table = WordEmbeddingTable(dimension=word_dim, vectors=word_vectors)
    author_table = None
    if payload.get("author_table") is not None:
        node_dim, node_vectors = _decode_table(payload["author_table"])
        author_table = NodeEmbeddingTable(dimension=node_dim, vectors=node_vectors)

    model = SocialAttentionModel(
        mode=mode,
        bases=bases,
        classes=tuple(payload["classes"]),
        word_table=word_table,
        author_table=author_table,
    )
    if mode in ATTENTION_MODES:
        model.attention = AttentionParams(
            weight=params["attention.weight"], bias=params["attention.bias"]
        )
    elif mode == MODE_MOE:
        model.moe = MoeGateParams(weight=params["moe.weight"], bias=params["moe.bias"])
    elif mode == MODE_CONCAT:
        model.concat = ConcatParams(weight=params["concat.weight"], bias=params["concat.bias"])
    return model, payload["config"]


__all__ = [
    "CheckpointError",
    "FORMAT_VERSION",
    "decode_tensor",
    "encode_tensor",
    "load_checkpoint",
    "save_checkpoint",
]
