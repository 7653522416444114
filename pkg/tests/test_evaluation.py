"""Tests for scoring, bootstrap comparison, and per-basis word analysis."""

import math
from collections import Counter

import numpy as np
import pytest

from socsent.corpus import (
    LABELS,
    NEGATIVE,
    NEUTRAL,
    POSITIVE,
    SentimentLexicon,
    WordEmbeddingTable,
)
from socsent.evaluation import (
    average_f1,
    bootstrap_significance,
    format_report,
    format_word_report,
    word_class_probs,
    word_specificity,
)
from socsent.cnn import basis_forward_matrix
from socsent.model import init_model


def lexicon(pos=("good", "fine"), neg=("bad", "awful")):
    return SentimentLexicon(positive_words=frozenset(pos), negative_words=frozenset(neg))


def specificity_model(num_bases=2, words=("good", "fine", "bad", "awful"), seed=0, dtype=np.float64):
    rng = np.random.default_rng(seed)
    table = WordEmbeddingTable(
        dimension=3,
        vectors={w: rng.uniform(-0.25, 0.25, size=3).astype(np.float32) for w in words},
    )
    return init_model(
        mode="single" if num_bases == 1 else "moe",
        num_bases=num_bases,
        num_filters=4,
        word_table=table,
        author_table=None,
        rng=rng,
        dtype=dtype,
    )


class TestAverageF1:
    def test_perfect_predictions(self):
        gold = [POSITIVE, NEGATIVE, NEUTRAL, POSITIVE]
        report = average_f1(gold, list(gold))
        assert report.average_f1 == 1.0
        assert report.f1[POSITIVE] == 1.0
        assert report.f1[NEGATIVE] == 1.0

    def test_five_sixths_fixture(self):
        """One negative truth lost to neutral: F1 1.0 and 2/3 average to 5/6."""
        gold = [POSITIVE, POSITIVE, NEGATIVE, NEGATIVE]
        pred = [POSITIVE, POSITIVE, NEGATIVE, NEUTRAL]
        report = average_f1(gold, pred)
        assert report.f1[POSITIVE] == 1.0
        assert report.f1[NEGATIVE] == 2 / 3
        assert report.average_f1 == (1.0 + 2 / 3) / 2
        np.testing.assert_allclose(report.average_f1, 0.8333333333333333, rtol=0, atol=0)

    def test_confusion_counts(self):
        gold = [POSITIVE, POSITIVE, NEGATIVE, NEUTRAL]
        pred = [POSITIVE, NEGATIVE, NEGATIVE, POSITIVE]
        report = average_f1(gold, pred)
        assert report.counts == ((1, 1, 0), (0, 1, 0), (1, 0, 0))

    def test_precision_recall_values(self):
        gold = [POSITIVE, POSITIVE, NEGATIVE, NEUTRAL]
        pred = [POSITIVE, NEGATIVE, NEGATIVE, POSITIVE]
        report = average_f1(gold, pred)
        assert report.precision[POSITIVE] == 0.5
        assert report.recall[POSITIVE] == 0.5
        assert report.precision[NEGATIVE] == 0.5
        assert report.recall[NEGATIVE] == 1.0
        assert report.recall[NEUTRAL] == 0.0

    def test_absent_class_scores_zero(self):
        report = average_f1([NEUTRAL, NEUTRAL], [NEUTRAL, NEUTRAL])
        assert report.f1[POSITIVE] == 0.0
        assert report.f1[NEGATIVE] == 0.0
        assert report.average_f1 == 0.0

    def test_neutral_excluded_from_average(self):
        """Getting every neutral wrong only hurts through polar columns."""
        gold = [POSITIVE, NEGATIVE]
        pred = [POSITIVE, NEGATIVE]
        base = average_f1(gold, pred).average_f1
        gold2 = gold + [NEUTRAL]
        pred2 = pred + [NEUTRAL]
        assert average_f1(gold2, pred2).average_f1 == base

    def test_exact_match_with_counting_oracle(self):
        """Scores equal an independent integer-count recomputation, bit for bit."""
        rng = np.random.default_rng(6)
        labels = list(LABELS)
        gold = [labels[i] for i in rng.integers(0, 3, size=100)]
        pred = [labels[i] for i in rng.integers(0, 3, size=100)]
        report = average_f1(gold, pred)
        pairs = Counter(zip(gold, pred))
        for target in (POSITIVE, NEGATIVE):
            tp = pairs[(target, target)]
            fp = sum(v for (g, p), v in pairs.items() if p == target and g != target)
            fn = sum(v for (g, p), v in pairs.items() if g == target and p != target)
            expected = (2 * tp) / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
            assert report.f1[target] == expected
        tp = pairs[(POSITIVE, POSITIVE)]
        fp_p = sum(v for (g, p), v in pairs.items() if p == POSITIVE and g != POSITIVE)
        fn_p = sum(v for (g, p), v in pairs.items() if g == POSITIVE and p != POSITIVE)
        f1_pos = (2 * tp) / (2 * tp + fp_p + fn_p)
        tn = pairs[(NEGATIVE, NEGATIVE)]
        fp_n = sum(v for (g, p), v in pairs.items() if p == NEGATIVE and g != NEGATIVE)
        fn_n = sum(v for (g, p), v in pairs.items() if g == NEGATIVE and p != NEGATIVE)
        f1_neg = (2 * tn) / (2 * tn + fp_n + fn_n)
        assert report.average_f1 == (f1_pos + f1_neg) / 2

    def test_pair_permutation_invariance(self):
        rng = np.random.default_rng(7)
        labels = list(LABELS)
        gold = [labels[i] for i in rng.integers(0, 3, size=40)]
        pred = [labels[i] for i in rng.integers(0, 3, size=40)]
        base = average_f1(gold, pred)
        order = rng.permutation(40)
        shuffled = average_f1([gold[i] for i in order], [pred[i] for i in order])
        assert base == shuffled

    def test_validation_errors(self):
        with pytest.raises(ValueError, match="length mismatch"):
            average_f1([POSITIVE], [POSITIVE, NEGATIVE])
        with pytest.raises(ValueError, match="empty"):
            average_f1([], [])
        with pytest.raises(ValueError, match="unknown gold"):
            average_f1(["happy"], [POSITIVE])
        with pytest.raises(ValueError, match="unknown predicted"):
            average_f1([POSITIVE], ["happy"])

    def test_format_report_layout(self):
        report = average_f1([POSITIVE, NEGATIVE], [POSITIVE, POSITIVE])
        text = format_report(report)
        lines = text.splitlines()
        assert lines[0] == "class\tprecision\trecall\tf1"
        assert len(lines) == 1 + 3 + 2 + 3
        for label in LABELS:
            assert any(line.startswith(label + "\t") for line in lines)


class TestBootstrapSignificance:
    def test_identical_predictions_not_significant(self):
        gold = [POSITIVE, NEGATIVE] * 10
        pred = [POSITIVE, POSITIVE] * 10
        p, sig = bootstrap_significance(gold, pred, list(pred))
        assert (p, sig) == (1.0, False)

    def test_perfect_beats_random(self):
        rng = np.random.default_rng(8)
        labels = [POSITIVE, NEGATIVE]
        gold = [labels[i] for i in rng.integers(0, 2, size=100)]
        random_pred = [labels[i] for i in rng.integers(0, 2, size=100)]
        p, sig = bootstrap_significance(
            gold, list(gold), random_pred, rng=np.random.default_rng(9)
        )
        assert p < 0.05
        assert sig

    def test_two_tailed_symmetry(self):
        rng = np.random.default_rng(10)
        labels = [POSITIVE, NEGATIVE]
        gold = [labels[i] for i in rng.integers(0, 2, size=60)]
        pred_a = list(gold)
        pred_b = [labels[i] for i in rng.integers(0, 2, size=60)]
        p_ab, _ = bootstrap_significance(gold, pred_a, pred_b, rng=np.random.default_rng(3))
        p_ba, _ = bootstrap_significance(gold, pred_b, pred_a, rng=np.random.default_rng(3))
        np.testing.assert_allclose(p_ab, p_ba, rtol=1e-12)

    def test_deterministic_given_rng(self):
        rng = np.random.default_rng(12)
        labels = [POSITIVE, NEGATIVE, NEUTRAL]
        gold = [labels[i] for i in rng.integers(0, 3, size=50)]
        pred_a = [labels[i] for i in rng.integers(0, 3, size=50)]
        pred_b = [labels[i] for i in rng.integers(0, 3, size=50)]
        p1, _ = bootstrap_significance(gold, pred_a, pred_b, rng=np.random.default_rng(4))
        p2, _ = bootstrap_significance(gold, pred_a, pred_b, rng=np.random.default_rng(4))
        assert p1 == p2

    def test_constant_nonzero_gap_is_significant(self):
        """Every resample favors A by the same margin, so p collapses to 0."""
        gold = [POSITIVE] * 30
        pred_a = [POSITIVE] * 30
        pred_b = [NEGATIVE] * 30
        p, sig = bootstrap_significance(gold, pred_a, pred_b)
        assert (p, sig) == (0.0, True)

    def test_validation(self):
        gold = [POSITIVE, NEGATIVE]
        with pytest.raises(ValueError, match="equal lengths"):
            bootstrap_significance(gold, [POSITIVE], [POSITIVE, NEGATIVE])
        with pytest.raises(ValueError, match="at least 2"):
            bootstrap_significance(gold, [POSITIVE, POSITIVE], gold, samples=1)


class TestWordClassProbs:
    def test_shape_and_normalization(self):
        model = specificity_model(num_bases=3)
        probs = word_class_probs(model, "good")
        assert probs.shape == (3, len(LABELS))
        np.testing.assert_allclose(probs.sum(axis=1), np.ones(3), rtol=1e-12)

    def test_matches_manual_padded_forward(self):
        model = specificity_model(num_bases=2)
        vec = model.word_table.vectors["bad"]
        x = np.stack([vec, np.zeros_like(vec)]).astype(np.float64)
        expected = np.stack(
            [basis_forward_matrix(x, basis)[0] for basis in model.bases]
        )
        np.testing.assert_array_equal(word_class_probs(model, "bad"), expected)

    def test_unknown_word_raises(self):
        with pytest.raises(KeyError):
            word_class_probs(specificity_model(), "nonexistent")


class TestWordSpecificity:
    def test_scores_sum_to_zero_across_bases(self):
        model = specificity_model(num_bases=4, dtype=np.float32)
        report = word_specificity(model, lexicon(), top_n=10)
        by_word = {}
        for lists in report.per_basis:
            for rw in lists.negative_words_by_positive_score:
                by_word.setdefault(("pos", rw.word), []).append(rw.score)
            for rw in lists.positive_words_by_negative_score:
                by_word.setdefault(("neg", rw.word), []).append(rw.score)
        assert by_word
        for scores in by_word.values():
            assert len(scores) == 4
            assert abs(sum(scores)) < 1e-9

    def test_single_basis_scores_are_exactly_zero(self):
        model = specificity_model(num_bases=1)
        report = word_specificity(model, lexicon())
        for lists in report.per_basis:
            for rw in (
                lists.negative_words_by_positive_score
                + lists.positive_words_by_negative_score
            ):
                assert rw.score == 0.0

    def test_two_basis_plus_minus_forty_percent(self):
        """Head biases forcing p(pos) of 0.9 and 0.1 give scores of +-0.4."""
        model = specificity_model(num_bases=2)
        for basis in model.bases:
            basis.head_weight[...] = 0.0
        model.bases[0].head_bias[...] = [math.log(18.0), 0.0, 0.0]
        model.bases[1].head_bias[...] = [math.log(2.0 / 9.0), 0.0, 0.0]
        probs = word_class_probs(model, "bad")
        np.testing.assert_allclose(probs[0, 0], 0.9, rtol=1e-12)
        np.testing.assert_allclose(probs[1, 0], 0.1, rtol=1e-12)
        report = word_specificity(model, lexicon(), top_n=10)
        scored = {
            rw.word: rw.score
            for rw in report.per_basis[0].negative_words_by_positive_score
        }
        np.testing.assert_allclose(scored["bad"], 0.4, rtol=1e-12)
        scored1 = {
            rw.word: rw.score
            for rw in report.per_basis[1].negative_words_by_positive_score
        }
        np.testing.assert_allclose(scored1["bad"], -0.4, rtol=1e-12)

    def test_rankings_are_descending_and_from_the_right_side(self):
        model = specificity_model(num_bases=3, words=("good", "fine", "bad", "awful"))
        report = word_specificity(model, lexicon(), top_n=5)
        for lists in report.per_basis:
            neg_scores = [rw.score for rw in lists.negative_words_by_positive_score]
            assert neg_scores == sorted(neg_scores, reverse=True)
            assert {rw.word for rw in lists.negative_words_by_positive_score} <= {
                "bad",
                "awful",
            }
            pos_scores = [rw.score for rw in lists.positive_words_by_negative_score]
            assert pos_scores == sorted(pos_scores, reverse=True)
            assert {rw.word for rw in lists.positive_words_by_negative_score} <= {
                "good",
                "fine",
            }

    def test_top_n_truncates(self):
        model = specificity_model(num_bases=2)
        report = word_specificity(model, lexicon(), top_n=1)
        for lists in report.per_basis:
            assert len(lists.negative_words_by_positive_score) == 1
            assert len(lists.positive_words_by_negative_score) == 1

    def test_oov_lexicon_words_counted(self):
        model = specificity_model(num_bases=2, words=("good", "bad"))
        report = word_specificity(
            model, lexicon(pos=("good", "fine"), neg=("bad", "awful"))
        )
        assert report.skipped_oov == 2
        for lists in report.per_basis:
            assert {rw.word for rw in lists.negative_words_by_positive_score} == {"bad"}

    def test_concat_mode_rejected(self):
        rng = np.random.default_rng(0)
        table = WordEmbeddingTable(
            dimension=2, vectors={"good": np.zeros(2, dtype=np.float32)}
        )
        from socsent.embeddings import NodeEmbeddingTable

        model = init_model(
            mode="concat",
            num_bases=1,
            num_filters=2,
            word_table=table,
            author_table=NodeEmbeddingTable(
                dimension=2, vectors={"u": np.zeros(2, dtype=np.float32)}
            ),
            rng=rng,
        )
        with pytest.raises(ValueError, match="per-basis"):
            word_specificity(model, lexicon())

    def test_bad_top_n_rejected(self):
        with pytest.raises(ValueError, match="top_n"):
            word_specificity(specificity_model(), lexicon(), top_n=0)

    def test_format_word_report(self):
        model = specificity_model(num_bases=2)
        report = word_specificity(model, lexicon(), top_n=2)
        text = format_word_report(report)
        lines = text.splitlines()
        assert lines[0] == "# skipped_oov\t0"
        assert any("basis 0" in line for line in lines)
        assert any("basis 1" in line for line in lines)
        assert any(line.startswith("  ") and "\t" in line for line in lines)
