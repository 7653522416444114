"""Socially informed sentiment classification.

A mixture of convolutional basis classifiers is gated by attention over
author embeddings learned from the social network, so the same words can
resolve to different sentiment for different authors. The package also
ships the supporting analyses: linguistic-homophily assortativity against
a rewired null model, bootstrap significance testing of classifier
comparisons, per-basis word-specificity ranking, and a planted-community
synthetic benchmark.
"""

from .corpus import (
    LABELS,
    NEGATIVE,
    NEUTRAL,
    POSITIVE,
    Document,
    LabeledCorpus,
    SentimentLexicon,
    WordEmbeddingTable,
    load_corpus,
    load_lexicon,
    load_word_embeddings,
    make_corpus,
    save_corpus,
    save_lexicon,
    save_word_embeddings,
    tokenize,
)
from .graph import (
    SocialGraph,
    degree_sequence,
    double_edge_swap_epoch,
    edge_overlap,
    load_edge_list,
    save_edge_list,
)
from .homophily import (
    assortativity,
    correctness_map,
    lexicon_classify,
    rewiring_experiment,
)
from .embeddings import (
    LineConfig,
    NodeEmbeddingTable,
    load_embeddings,
    noise_distribution,
    save_embeddings,
    train_line_embeddings,
)
from .cnn import (
    BasisModelParams,
    basis_backward,
    basis_forward,
    class_probs,
    conv_forward,
    embed_tokens,
    init_basis_params,
    max_pool,
)
from .model import (
    MODES,
    SocialAttentionModel,
    attention_weights,
    concat_forward,
    init_model,
    mixture_predict,
    moe_gate,
    predict_label,
    predict_proba,
    random_attention_embeddings,
)
from .training import (
    InstanceWeights,
    PretrainConfig,
    TrainConfig,
    adam_step,
    instance_weights,
    joint_train,
    loss_and_grads,
    pretrain_basis,
    pretrain_model,
)
from .evaluation import (
    EvalReport,
    average_f1,
    bootstrap_significance,
    word_specificity,
)
from .synth import SynthConfig, generate, planted_two_block_graph
from .checkpoint import load_checkpoint, save_checkpoint
from .rng import derive_rng

__version__ = "0.1.0"
