"""Average F1 of the polar classes, bootstrap comparison, and per-basis word analysis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .cnn import basis_forward_matrix
from .corpus import LABELS, NEGATIVE, POSITIVE, SentimentLexicon
from .model import MODE_CONCAT, SocialAttentionModel


@dataclass(frozen=True)
class EvalReport:
    """Three-way confusion matrix plus the derived per-class scores.

    ``counts[i][j]`` is the number of documents with gold class i predicted
    as class j, classes ordered as in ``classes``.
    """

    classes: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    average_f1: float


def _f1_from_counts(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return (2 * tp) / denom if denom else 0.0


def average_f1(gold, pred, classes=LABELS) -> EvalReport:
    """Score predictions; the headline number averages F1 of positive and negative.

    A class with no gold and no predicted instances scores 0. Neutral
    enters the confusion matrix (mistakes into or out of it are penalized)
    but not the average.
    """
    gold = list(gold)
    pred = list(pred)
    if len(gold) != len(pred):
        raise ValueError(f"length mismatch: {len(gold)} gold vs {len(pred)} predictions")
    if not gold:
        raise ValueError("cannot score an empty prediction list")
    index = {label: i for i, label in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for g, p in zip(gold, pred):
        if g not in index:
            raise ValueError(f"unknown gold label {g!r}")
        if p not in index:
            raise ValueError(f"unknown predicted label {p!r}")
        counts[index[g], index[p]] += 1

    precision = {}
    recall = {}
    f1 = {}
    for label, i in index.items():
        tp = int(counts[i, i])
        fp = int(counts[:, i].sum()) - tp
        fn = int(counts[i, :].sum()) - tp
        precision[label] = tp / (tp + fp) if tp + fp else 0.0
        recall[label] = tp / (tp + fn) if tp + fn else 0.0
        f1[label] = _f1_from_counts(tp, fp, fn)

    return EvalReport(
        classes=tuple(classes),
        counts=tuple(tuple(int(c) for c in row) for row in counts),
        precision=precision,
        recall=recall,
        f1=f1,
        average_f1=(f1[POSITIVE] + f1[NEGATIVE]) / 2,
    )


def format_report(report: EvalReport) -> str:
    lines = ["class\tprecision\trecall\tf1"]
    for label in report.classes:
        lines.append(
            f"{label}\t{report.precision[label]:.6f}"
            f"\t{report.recall[label]:.6f}\t{report.f1[label]:.6f}"
        )
    lines.append("confusion matrix (rows gold, cols predicted):")
    lines.append("\t" + "\t".join(report.classes))
    for label, row in zip(report.classes, report.counts):
        lines.append(label + "\t" + "\t".join(str(c) for c in row))
    return "\n".join(lines)


def bootstrap_significance(
    gold, pred_a, pred_b, samples: int = 100, rng: np.random.Generator | None = None
) -> tuple[float, bool]:
    """Paired two-tailed t-test over bootstrap resamples of the test set.

    Each resample redraws document indices with replacement from its own
    spawned RNG stream, scores both prediction lists, and the per-sample
    average-F1 pairs feed a paired t-test. Identical predictions are not
    significant by convention (p = 1). Returns (p-value, significant at 0.05).
    """
    gold = list(gold)
    pred_a = list(pred_a)
    pred_b = list(pred_b)
    if not (len(gold) == len(pred_a) == len(pred_b)):
        raise ValueError("gold and both prediction lists must have equal lengths")
    if samples < 2:
        raise ValueError(f"need at least 2 bootstrap samples, got {samples}")
    if pred_a == pred_b:
        return 1.0, False
    if rng is None:
        rng = np.random.default_rng(0)

    n = len(gold)
    streams = rng.spawn(samples)
    scores_a = np.empty(samples)
    scores_b = np.empty(samples)
    for s, stream in enumerate(streams):
        idx = stream.integers(0, n, size=n)
        g = [gold[i] for i in idx]
        scores_a[s] = average_f1(g, [pred_a[i] for i in idx]).average_f1
        scores_b[s] = average_f1(g, [pred_b[i] for i in idx]).average_f1

    diffs = scores_a - scores_b
    if float(np.std(diffs)) == 0.0:
        p_value = 1.0 if float(np.mean(diffs)) == 0.0 else 0.0
    else:
        p_value = float(stats.ttest_rel(scores_a, scores_b).pvalue)
    return p_value, p_value < 0.05


@dataclass(frozen=True)
class RankedWord:
    word: str
    score: float


@dataclass(frozen=True)
class BasisWordLists:
    """Lexicon words this basis scores far above the across-basis mean."""

    basis: int
    negative_words_by_positive_score: tuple[RankedWord, ...]
    positive_words_by_negative_score: tuple[RankedWord, ...]


@dataclass(frozen=True)
class WordSpecificityReport:
    per_basis: tuple[BasisWordLists, ...]
    skipped_oov: int


def word_class_probs(model: SocialAttentionModel, word: str) -> np.ndarray:
    """Per-basis class probabilities for a single-word pseudo-document.

    The word's vector is paired with one zero-padding row so the bigram
    filter applies; returns a (K, T) matrix.
    """
    vec = model.word_table.vectors[word]
    dtype = model.bases[0].conv_left.dtype
    x = np.stack([vec, np.zeros_like(vec)]).astype(dtype)
    return np.stack([basis_forward_matrix(x, basis)[0] for basis in model.bases])


def word_specificity(
    model: SocialAttentionModel, lexicon: SentimentLexicon, top_n: int = 5
) -> WordSpecificityReport:
    """Rank lexicon words by how far each basis deviates from the basis mean.

    For each in-vocabulary lexicon word w the score of basis k for class y
    is p(y|w,k) minus the across-basis mean of the same probability. Each
    basis reports the negative-lexicon words it pushes hardest toward
    positive and the positive-lexicon words it pushes hardest toward
    negative. Out-of-vocabulary lexicon words are skipped and counted.
    """
    if model.mode == MODE_CONCAT:
        raise ValueError("word specificity requires per-basis class probabilities")
    if top_n < 1:
        raise ValueError(f"top_n must be positive, got {top_n}")
    pos_idx = model.classes.index(POSITIVE)
    neg_idx = model.classes.index(NEGATIVE)
    vocab = model.word_table.vectors

    scores: dict[str, np.ndarray] = {}
    skipped = 0
    for word in sorted(lexicon.positive_words | lexicon.negative_words):
        if word not in vocab:
            skipped += 1
            continue
        probs = word_class_probs(model, word).astype(np.float64)
        scores[word] = probs - probs.mean(axis=0)

    def top(words, k: int, class_idx: int):
        ranked = sorted(
            ((w, float(scores[w][k, class_idx])) for w in words if w in scores),
            key=lambda item: (-item[1], item[0]),
        )
        return tuple(RankedWord(w, s) for w, s in ranked[:top_n])

    per_basis = tuple(
        BasisWordLists(
            basis=k,
            negative_words_by_positive_score=top(lexicon.negative_words, k, pos_idx),
            positive_words_by_negative_score=top(lexicon.positive_words, k, neg_idx),
        )
        for k in range(model.num_bases)
    )
    return WordSpecificityReport(per_basis=per_basis, skipped_oov=skipped)


def format_word_report(report: WordSpecificityReport) -> str:
    lines = [f"# skipped_oov\t{report.skipped_oov}"]
    for lists in report.per_basis:
        lines.append(f"basis {lists.basis}: negative-lexicon words scored positive")
        for rw in lists.negative_words_by_positive_score:
            lines.append(f"  {rw.word}\t{rw.score:+.6f}")
        lines.append(f"basis {lists.basis}: positive-lexicon words scored negative")
        for rw in lists.positive_words_by_negative_score:
            lines.append(f"  {rw.word}\t{rw.score:+.6f}")
    return "\n".join(lines)


__all__ = [
    "BasisWordLists",
    "EvalReport",
    "RankedWord",
    "WordSpecificityReport",
    "average_f1",
    "bootstrap_significance",
    "format_report",
    "format_word_report",
    "word_class_probs",
    "word_specificity",
]
