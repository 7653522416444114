"""Instance-weighted pretraining and joint Adam training with early stopping.

Pretraining gives each basis model a soft region of the author network:
basis k sees instance weights alpha_{a,k} = sigmoid(gamma_k . v_a) with
gamma_k drawn once from N(0, sigma^2 I). Joint training then minimizes the
negative log of the mixture marginal over all trainable parameters, keeps
per-epoch dev scores, and returns the best-epoch parameters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .cnn import basis_backward, basis_forward_matrix, embed_tokens, softmax_backward
from .corpus import Document, LabeledCorpus
from .embeddings import NodeEmbeddingTable
from .evaluation import average_f1
from .model import (
    ATTENTION_MODES,
    MODE_CONCAT,
    MODE_MOE,
    MODE_SINGLE,
    SocialAttentionModel,
    bag_of_vectors,
    predict_label,
    warn_unknown_author,
)
from .rng import derive_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PretrainConfig:
    sigma: float = 1.0
    pretrain_epochs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.pretrain_epochs < 0:
            raise ValueError(f"pretrain_epochs must be nonnegative, got {self.pretrain_epochs}")


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 15
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be positive, got {self.max_epochs}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("adam betas must lie strictly between 0 and 1")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")


@dataclass(frozen=True)
class InstanceWeights:
    """(author, basis index) -> weight in (0,1); unknown authors weigh 0.5."""

    num_bases: int
    values: dict[tuple[str, int], float]

    def get(self, author: str, k: int) -> float:
        return self.values.get((author, k), 0.5)


def instance_weights(
    table: NodeEmbeddingTable, num_bases: int, cfg: PretrainConfig, rng: np.random.Generator
) -> tuple[InstanceWeights, np.ndarray]:
    """Draw gamma_k once per basis and weight every author in the table.

    Returns the weights and the (K, D) gamma matrix so the attention gate
    can be initialized from it.
    """
    gammas = rng.normal(0.0, cfg.sigma, size=(num_bases, table.dimension))
    values: dict[tuple[str, int], float] = {}
    for author, vec in table.vectors.items():
        scores = gammas @ vec.astype(np.float64)
        alphas = np.clip(expit(scores), 1e-12, 1.0 - 1e-12)
        for k in range(num_bases):
            values[(author, k)] = float(alphas[k])
    return InstanceWeights(num_bases=num_bases, values=values), gammas


@dataclass
class AdamState:
    """First/second moment estimates and the shared step counter."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0


def init_adam_state(params: dict[str, np.ndarray]) -> AdamState:
    return AdamState(
        m={name: np.zeros_like(arr) for name, arr in params.items()},
        v={name: np.zeros_like(arr) for name, arr in params.items()},
    )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    cfg: TrainConfig,
) -> AdamState:
    """Standard bias-corrected Adam update, applied to the params in place."""
    state.step += 1
    t = state.step
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    for name, arr in params.items():
        g = grads[name]
        state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        state.v[name] = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = state.m[name] / (1.0 - b1**t)
        v_hat = state.v[name] / (1.0 - b2**t)
        arr -= (cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_epsilon)).astype(arr.dtype)
    return state


def _zero_grads(params: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(arr) for name, arr in params.items()}


def _onehot_grad(probs: np.ndarray, true_idx: int) -> np.ndarray:
    grad = np.zeros_like(probs)
    grad[true_idx] = -1.0 / probs[true_idx]
    return grad


def loss_and_grads(
    model: SocialAttentionModel, docs: list[Document]
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean negative log-likelihood over the batch and its exact gradients.

    Gradients cover every trainable parameter (basis models plus the active
    gate or head); author and word embeddings stay frozen. Documents whose
    author lacks an embedding contribute a constant uniform gate, hence no
    gate gradient.
    """
    params = model.trainable_parameters()
    grads = _zero_grads(params)
    class_index = {label: t for t, label in enumerate(model.classes)}
    total_loss = 0.0

    for doc in docs:
        true_idx = class_index[doc.label]
        dtype = model.bases[0].conv_left.dtype
        x = embed_tokens(doc, model.word_table, dtype=dtype)

        if model.mode == MODE_CONCAT:
            total_loss += _concat_instance(model, doc, x, true_idx, grads)
            continue

        probs_all = []
        caches = []
        for basis in model.bases:
            probs, cache = basis_forward_matrix(x, basis)
            probs_all.append(probs)
            caches.append(cache)

        gate, gate_input = _gate_forward(model, doc)
        mix = np.zeros_like(probs_all[0])
        for k in range(model.num_bases):
            mix = mix + gate[k] * probs_all[k]
        total_loss += -float(np.log(mix[true_idx]))

        dmix = _onehot_grad(mix, true_idx)
        for k, basis in enumerate(model.bases):
            basis_grads = basis_backward(caches[k], gate[k] * dmix, basis)
            for field_name, g in basis_grads.items():
                grads[f"basis.{k}.{field_name}"] += g

        if gate_input is not None:
            dgate = np.array([float(probs_all[k] @ dmix) for k in range(model.num_bases)])
            dscores = softmax_backward(gate, dgate)
            if model.mode in ATTENTION_MODES:
                grads["attention.weight"] += np.outer(dscores, gate_input).astype(dtype)
                grads["attention.bias"] += dscores.astype(dtype)
            elif model.mode == MODE_MOE:
                grads["moe.weight"] += np.outer(dscores, gate_input).astype(dtype)
                grads["moe.bias"] += dscores.astype(dtype)

    n = len(docs)
    if n == 0:
        raise ValueError("loss needs at least one document")
    for name in grads:
        grads[name] /= n
    return total_loss / n, grads


def _gate_forward(model: SocialAttentionModel, doc: Document):
    """Gate distribution plus the input it was computed from (None if constant)."""
    k = model.num_bases
    if model.mode == MODE_SINGLE:
        return np.ones(1, dtype=model.bases[0].conv_left.dtype), None
    if model.mode == MODE_MOE:
        sent = bag_of_vectors(doc, model.word_table, dtype=model.moe.weight.dtype)
        scores = model.moe.weight @ sent + model.moe.bias
        return _softmax(scores), sent
    if doc.author not in model.author_table:
        warn_unknown_author(doc.author)
        return np.full(k, 1.0 / k, dtype=model.bases[0].conv_left.dtype), None
    v = model.author_table[doc.author]
    scores = model.attention.weight @ v + model.attention.bias
    return _softmax(scores), v


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    expd = np.exp(shifted)
    return expd / expd.sum()


def _concat_instance(model, doc, x, true_idx, grads) -> float:
    """Loss and gradient contribution of one document in concat mode."""
    from .cnn import conv_forward

    basis = model.bases[0]
    dtype = basis.conv_left.dtype
    conv = conv_forward(x, basis)
    argmax_rows = conv.argmax(axis=0)
    cols = np.arange(conv.shape[1])
    pooled = conv[argmax_rows, cols]
    if doc.author in model.author_table:
        v = model.author_table[doc.author].astype(dtype)
    else:
        warn_unknown_author(doc.author)
        v = np.zeros(model.author_table.dimension, dtype=dtype)
    z = np.concatenate([pooled, v])
    probs = _softmax(model.concat.weight @ z + model.concat.bias)
    loss = -float(np.log(probs[true_idx]))

    dlogits = probs.copy()
    dlogits[true_idx] -= 1.0
    grads["concat.weight"] += np.outer(dlogits, z).astype(dtype)
    grads["concat.bias"] += dlogits.astype(dtype)
    m = basis.num_filters
    ds = model.concat.weight[:, :m].T @ dlogits
    dconv = np.zeros_like(conv)
    dconv[argmax_rows, cols] = ds
    dpre = dconv * (1.0 - conv**2)
    grads["basis.0.conv_left"] += dpre.T @ x[:-1]
    grads["basis.0.conv_right"] += dpre.T @ x[1:]
    grads["basis.0.conv_bias"] += dpre.sum(axis=0)
    return loss


def _batches(indices: np.ndarray, batch_size: int):
    for start in range(0, len(indices), batch_size):
        yield indices[start : start + batch_size]


def pretrain_basis(
    k: int,
    corpus: LabeledCorpus,
    weights: InstanceWeights,
    model: SocialAttentionModel,
    pre_cfg: PretrainConfig,
    train_cfg: TrainConfig,
) -> None:
    """Adam on basis k alone, each instance scaled by its alpha_{a,k}.

    The weighted loss is -alpha * log p_k(true class); the gate is not
    touched. Reuses the joint learning rate and batch size.
    """
    basis = model.bases[k]
    names = ("conv_left", "conv_right", "conv_bias", "head_weight", "head_bias")
    params = {name: getattr(basis, name) for name in names}
    state = init_adam_state(params)
    class_index = {label: t for t, label in enumerate(model.classes)}
    rng = derive_rng(pre_cfg.seed, "pretrain-shuffle", index=k)
    docs = list(corpus)

    for _ in range(pre_cfg.pretrain_epochs):
        order = rng.permutation(len(docs))
        for batch_idx in _batches(order, train_cfg.batch_size):
            grads = _zero_grads(params)
            for i in batch_idx:
                doc = docs[int(i)]
                alpha = weights.get(doc.author, k)
                x = embed_tokens(doc, model.word_table, dtype=basis.conv_left.dtype)
                probs, cache = basis_forward_matrix(x, basis)
                dprobs = alpha * _onehot_grad(probs, class_index[doc.label])
                for name, g in basis_backward(cache, dprobs, basis).items():
                    grads[name] += g
            for name in grads:
                grads[name] /= len(batch_idx)
            adam_step(params, grads, state, train_cfg)


def pretrain_model(
    model: SocialAttentionModel,
    corpus: LabeledCorpus,
    pre_cfg: PretrainConfig,
    train_cfg: TrainConfig,
) -> InstanceWeights:
    """Weight, pretrain every basis, then point the gate at the regions.

    After pretraining the attention parameters are set to phi_k := gamma_k,
    b_k := 0, so each basis starts gated toward the authors it saw most.
    """
    if model.mode not in ATTENTION_MODES:
        raise ValueError(f"pretraining applies to attention modes, not {model.mode!r}")
    rng = derive_rng(pre_cfg.seed, "instance-weights")
    weights, gammas = instance_weights(model.author_table, model.num_bases, pre_cfg, rng)
    for k in range(model.num_bases):
        pretrain_basis(k, corpus, weights, model, pre_cfg, train_cfg)
    dtype = model.attention.weight.dtype
    model.attention.weight[...] = gammas.astype(dtype)
    model.attention.bias[...] = np.zeros(model.num_bases, dtype=dtype)
    return weights


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    dev_f1: float


@dataclass
class TrainHistory:
    records: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0

    def best_dev_f1(self) -> float:
        return max(r.dev_f1 for r in self.records)


def write_history(history: TrainHistory, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"# best_epoch\t{history.best_epoch}\n")
        fh.write("epoch\ttrain_loss\tdev_f1\n")
        for r in history.records:
            fh.write(f"{r.epoch}\t{r.train_loss:.9g}\t{r.dev_f1:.9g}\n")


def dev_average_f1(model: SocialAttentionModel, dev: LabeledCorpus) -> float:
    gold = [doc.label for doc in dev]
    pred = [predict_label(doc, doc.author, model) for doc in dev]
    return average_f1(gold, pred).average_f1


def joint_train(
    model: SocialAttentionModel,
    train_corpus: LabeledCorpus,
    dev_corpus: LabeledCorpus,
    cfg: TrainConfig,
) -> tuple[SocialAttentionModel, TrainHistory]:
    """Minimize the mixture NLL with Adam; return the best-dev-epoch model.

    Batches are reshuffled every epoch from the run seed. After each epoch
    the dev average F1 is recorded; the returned model carries the
    parameters of the best epoch (first epoch wins ties).
    """
    if len(train_corpus) == 0:
        raise ValueError("training corpus is empty")
    docs = list(train_corpus)
    params = model.trainable_parameters()
    state = init_adam_state(params)
    rng = derive_rng(cfg.seed, "joint-train-shuffle")
    history = TrainHistory()
    best_f1 = -1.0
    best_snapshot = model.snapshot()

    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(docs))
        epoch_losses = []
        for batch_idx in _batches(order, cfg.batch_size):
            batch = [docs[int(i)] for i in batch_idx]
            loss, grads = loss_and_grads(model, batch)
            adam_step(params, grads, state, cfg)
            epoch_losses.append(loss)
        dev_f1 = dev_average_f1(model, dev_corpus)
        history.records.append(EpochRecord(epoch, float(np.mean(epoch_losses)), dev_f1))
        if dev_f1 > best_f1:
            best_f1 = dev_f1
            best_snapshot = model.snapshot()
            history.best_epoch = epoch

    model.restore(best_snapshot)
    return model, history


__all__ = [
    "AdamState",
    "EpochRecord",
    "InstanceWeights",
    "PretrainConfig",
    "TrainConfig",
    "TrainHistory",
    "adam_step",
    "dev_average_f1",
    "init_adam_state",
    "instance_weights",
    "joint_train",
    "loss_and_grads",
    "pretrain_basis",
    "pretrain_model",
    "write_history",
]
