"""Command-line front end tying the pipeline into reproducible experiments.

Subcommands: embed-network, train, eval, homophily, analyze-words, synth.
Every flag can also be supplied through a JSON config file (--config);
explicit flags win. Exit codes: 0 success, 1 runtime failure, 2 usage or
configuration error. Each command ends with one machine-parseable
key=value line on stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .corpus import (
    CorpusFormatError,
    load_corpus,
    load_lexicon,
    load_word_embeddings,
    save_corpus,
    save_lexicon,
    save_word_embeddings,
)
from .embeddings import (
    LineConfig,
    estimate_objective,
    load_embeddings,
    save_embeddings,
    train_line_embeddings,
)
from .evaluation import (
    average_f1,
    bootstrap_significance,
    format_report,
    format_word_report,
    word_specificity,
)
from .graph import GraphFormatError, load_edge_list, save_edge_list
from .homophily import correctness_map, rewiring_experiment, write_rewiring_report
from .model import (
    ATTENTION_MODES,
    MODE_MOE,
    MODE_RANDOM,
    MODE_SINGLE,
    MODES,
    init_model,
    predict_label,
    random_attention_embeddings,
)
from .rng import derive_rng
from .synth import SynthConfig, generate
from .training import (
    PretrainConfig,
    TrainConfig,
    joint_train,
    pretrain_model,
    write_history,
)
from .vecio import VectorFormatError

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
RUNTIME_ERROR = 1

_INPUT_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    CorpusFormatError,
    GraphFormatError,
    VectorFormatError,
    CheckpointError,
    ValueError,
)


class ConfigError(ValueError):
    """Raised when merged flag/config values fail validation."""


def _merge_config(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < JSON config file < explicit flags; unknown keys rejected."""
    explicit = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    merged = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            file_values = json.load(fh)
        if not isinstance(file_values, dict):
            raise ConfigError(f"{config_path}: config must be a JSON object")
        unknown = sorted(set(file_values) - set(defaults))
        if unknown:
            raise ConfigError(f"{config_path}: unknown config fields: {', '.join(unknown)}")
        merged.update(file_values)
    merged.update(explicit)
    return merged


def _require(cfg: dict, fields) -> None:
    missing = [f for f in fields if cfg.get(f) is None]
    if missing:
        raise ConfigError("missing required settings: " + ", ".join(missing))


def cmd_embed_network(args: argparse.Namespace) -> int:
    cfg = _merge_config(
        args,
        {
            "edges": None,
            "output": None,
            "dimension": 100,
            "negative_samples": 5,
            "learning_rate": 0.025,
            "epochs": 5,
            "noise_exponent": 0.75,
            "seed": 0,
        },
    )
    _require(cfg, ["edges", "output"])
    graph = load_edge_list(cfg["edges"])
    line_cfg = LineConfig(
        dimension=cfg["dimension"],
        negative_samples=cfg["negative_samples"],
        learning_rate=cfg["learning_rate"],
        epochs=cfg["epochs"],
        noise_exponent=cfg["noise_exponent"],
    )
    table = train_line_embeddings(graph, line_cfg, derive_rng(cfg["seed"], "node-embeddings"))
    save_embeddings(table, cfg["output"])
    objective = estimate_objective(table, graph, line_cfg)
    print(f"objective={objective:.6f}")
    return 0


TRAIN_DEFAULTS = {
    "train": None,
    "dev": None,
    "word_embeddings": None,
    "author_embeddings": None,
    "checkpoint": None,
    "history": None,
    "mode": "social",
    "num_bases": 5,
    "num_filters": 100,
    "author_dim": 100,
    "sigma": 1.0,
    "pretrain_epochs": 1,
    "max_epochs": 15,
    "learning_rate": 1e-3,
    "adam_beta1": 0.9,
    "adam_beta2": 0.999,
    "adam_epsilon": 1e-8,
    "batch_size": 32,
    "seed": 0,
}


def _validate_train_config(cfg: dict) -> list[str]:
    problems = []
    if cfg["mode"] not in MODES:
        problems.append(f"mode: {cfg['mode']!r} is not one of {MODES}")
    for field in ("num_bases", "num_filters", "max_epochs", "batch_size"):
        if not isinstance(cfg[field], int) or cfg[field] < 1:
            problems.append(f"{field}: must be a positive integer, got {cfg[field]!r}")
    if cfg["pretrain_epochs"] is None or cfg["pretrain_epochs"] < 0:
        problems.append(f"pretrain_epochs: must be nonnegative, got {cfg['pretrain_epochs']!r}")
    for field in ("sigma", "learning_rate"):
        if not cfg[field] > 0:
            problems.append(f"{field}: must be positive, got {cfg[field]!r}")
    for field in ("adam_beta1", "adam_beta2"):
        if not (0 < cfg[field] < 1):
            problems.append(f"{field}: must lie strictly between 0 and 1, got {cfg[field]!r}")
    if cfg["mode"] in ATTENTION_MODES or cfg["mode"] == "concat":
        if cfg["mode"] != MODE_RANDOM and cfg["author_embeddings"] is None:
            problems.append(f"author_embeddings: required for mode={cfg['mode']}")
    return problems


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _merge_config(args, TRAIN_DEFAULTS)
    _require(cfg, ["train", "dev", "word_embeddings", "checkpoint"])
    problems = _validate_train_config(cfg)
    if problems:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))

    train_corpus = load_corpus(cfg["train"])
    dev_corpus = load_corpus(cfg["dev"])
    word_table = load_word_embeddings(cfg["word_embeddings"])

    author_table = None
    if cfg["author_embeddings"] is not None:
        author_table = load_embeddings(cfg["author_embeddings"])
    if cfg["mode"] == MODE_RANDOM:
        authors = (
            set(author_table.vectors)
            if author_table is not None
            else {doc.author for doc in train_corpus} | {doc.author for doc in dev_corpus}
        )
        dim = author_table.dimension if author_table is not None else cfg["author_dim"]
        author_table = random_attention_embeddings(
            authors, dim, derive_rng(cfg["seed"], "random-author-embeddings")
        )

    model = init_model(
        mode=cfg["mode"],
        num_bases=cfg["num_bases"],
        num_filters=cfg["num_filters"],
        word_table=word_table,
        author_table=author_table,
        rng=derive_rng(cfg["seed"], "model-init"),
    )
    pre_cfg = PretrainConfig(
        sigma=cfg["sigma"], pretrain_epochs=cfg["pretrain_epochs"], seed=cfg["seed"]
    )
    train_cfg = TrainConfig(
        max_epochs=cfg["max_epochs"],
        learning_rate=cfg["learning_rate"],
        adam_beta1=cfg["adam_beta1"],
        adam_beta2=cfg["adam_beta2"],
        adam_epsilon=cfg["adam_epsilon"],
        batch_size=cfg["batch_size"],
        seed=cfg["seed"],
    )
    if model.mode in ATTENTION_MODES and pre_cfg.pretrain_epochs > 0:
        pretrain_model(model, train_corpus, pre_cfg, train_cfg)
    model, history = joint_train(model, train_corpus, dev_corpus, train_cfg)

    echo = {k: v for k, v in cfg.items() if v is None or isinstance(v, (str, int, float, bool))}
    echo["num_bases"] = model.num_bases
    save_checkpoint(model, cfg["checkpoint"], config_echo=echo)
    if cfg["history"]:
        write_history(history, cfg["history"])
    print(f"best_epoch={history.best_epoch}")
    print(f"best_dev_f1={history.best_dev_f1():.6f}")
    return 0


def _predictions(model, corpus):
    return [predict_label(doc, doc.author, model) for doc in corpus]


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _merge_config(
        args,
        {
            "checkpoint": None,
            "corpus": None,
            "compare": None,
            "samples": 100,
            "seed": 0,
            "report": None,
        },
    )
    _require(cfg, ["checkpoint", "corpus"])
    model, _ = load_checkpoint(cfg["checkpoint"])
    corpus = load_corpus(cfg["corpus"])
    gold = [doc.label for doc in corpus]
    pred = _predictions(model, corpus)
    report = average_f1(gold, pred)
    print(format_report(report))
    if cfg["report"]:
        Path(cfg["report"]).write_text(format_report(report) + "\n", encoding="utf-8")
    if cfg["compare"]:
        other, _ = load_checkpoint(cfg["compare"])
        pred_b = _predictions(other, corpus)
        report_b = average_f1(gold, pred_b)
        p_value, significant = bootstrap_significance(
            gold, pred, pred_b, samples=cfg["samples"], rng=derive_rng(cfg["seed"], "bootstrap")
        )
        print(f"avg_f1_compare={report_b.average_f1:.6f}")
        print(f"significant={'true' if significant else 'false'}")
        print(f"p_value={p_value:.6f}")
    print(f"avg_f1={report.average_f1:.6f}")
    return 0


def cmd_homophily(args: argparse.Namespace) -> int:
    cfg = _merge_config(
        args,
        {
            "edges": None,
            "corpus": None,
            "pos_lexicon": None,
            "neg_lexicon": None,
            "output": None,
            "epochs": 5,
            "trials": 10,
            "seed": 0,
        },
    )
    _require(cfg, ["edges", "corpus", "pos_lexicon", "neg_lexicon", "output"])
    graph = load_edge_list(cfg["edges"])
    corpus = load_corpus(cfg["corpus"])
    lexicon = load_lexicon(cfg["pos_lexicon"], cfg["neg_lexicon"])
    cmap = correctness_map(corpus, lexicon)
    report = rewiring_experiment(
        graph, cmap, epochs=cfg["epochs"], trials=cfg["trials"],
        rng=derive_rng(cfg["seed"], "rewiring"),
    )
    write_rewiring_report(report, cfg["output"])
    print(f"observed_assortativity={report.observed:.6f}")
    return 0


def cmd_analyze_words(args: argparse.Namespace) -> int:
    cfg = _merge_config(
        args,
        {
            "checkpoint": None,
            "pos_lexicon": None,
            "neg_lexicon": None,
            "top_n": 5,
            "output": None,
        },
    )
    _require(cfg, ["checkpoint", "pos_lexicon", "neg_lexicon"])
    model, _ = load_checkpoint(cfg["checkpoint"])
    lexicon = load_lexicon(cfg["pos_lexicon"], cfg["neg_lexicon"])
    report = word_specificity(model, lexicon, top_n=cfg["top_n"])
    text = format_word_report(report)
    print(text)
    if cfg["output"]:
        Path(cfg["output"]).write_text(text + "\n", encoding="utf-8")
    print(f"skipped_oov={report.skipped_oov}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _merge_config(
        args,
        {
            "output_dir": None,
            "nodes_per_community": 100,
            "intra_edge_prob": 0.1,
            "inter_edge_prob": 0.005,
            "flip_words": "pos00,neg00",
            "docs_per_author": 5,
            "vocab_size": 24,
            "word_dim": 16,
            "flip_doc_fraction": 0.4,
            "seed": 0,
        },
    )
    _require(cfg, ["output_dir"])
    flip_words = tuple(w for w in str(cfg["flip_words"]).split(",") if w)
    synth_cfg = SynthConfig(
        nodes_per_community=cfg["nodes_per_community"],
        intra_edge_prob=cfg["intra_edge_prob"],
        inter_edge_prob=cfg["inter_edge_prob"],
        flip_words=flip_words,
        docs_per_author=cfg["docs_per_author"],
        vocab_size=cfg["vocab_size"],
        word_dim=cfg["word_dim"],
        flip_doc_fraction=cfg["flip_doc_fraction"],
        seed=cfg["seed"],
    )
    data = generate(synth_cfg)
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    save_edge_list(data.graph, out / "graph.edges")
    save_corpus(data.train, out / "train.tsv")
    save_corpus(data.dev, out / "dev.tsv")
    save_corpus(data.test, out / "test.tsv")
    save_word_embeddings(data.word_table, out / "words.vec")
    save_lexicon(data.lexicon, out / "lexicon.pos", out / "lexicon.neg")
    total = len(data.train) + len(data.dev) + len(data.test)
    print(f"nodes={len(data.graph.nodes)} edges={data.graph.num_edges}")
    print(f"documents={total}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socsent",
        description="Socially informed sentiment classification experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, helptext, flags):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="JSON file with defaults for any flag")
        for flag, kwargs in flags.items():
            p.add_argument(flag, default=argparse.SUPPRESS, **kwargs)
        p.set_defaults(func=func)

    add(
        "embed-network",
        cmd_embed_network,
        "train node embeddings from an edge list",
        {
            "--edges": {"help": "edge-list file"},
            "--output": {"help": "embedding file to write"},
            "--dimension": {"type": int},
            "--negative-samples": {"type": int, "dest": "negative_samples"},
            "--learning-rate": {"type": float, "dest": "learning_rate"},
            "--epochs": {"type": int},
            "--noise-exponent": {"type": float, "dest": "noise_exponent"},
            "--seed": {"type": int},
        },
    )
    add(
        "train",
        cmd_train,
        "pretrain and jointly train a model",
        {
            "--train": {"help": "training corpus TSV"},
            "--dev": {"help": "development corpus TSV"},
            "--word-embeddings": {"dest": "word_embeddings"},
            "--author-embeddings": {"dest": "author_embeddings"},
            "--checkpoint": {"help": "checkpoint file to write"},
            "--history": {"help": "per-epoch history file to write"},
            "--mode": {"choices": list(MODES)},
            "--num-bases": {"type": int, "dest": "num_bases"},
            "--num-filters": {"type": int, "dest": "num_filters"},
            "--author-dim": {"type": int, "dest": "author_dim"},
            "--sigma": {"type": float},
            "--pretrain-epochs": {"type": int, "dest": "pretrain_epochs"},
            "--max-epochs": {"type": int, "dest": "max_epochs"},
            "--learning-rate": {"type": float, "dest": "learning_rate"},
            "--adam-beta1": {"type": float, "dest": "adam_beta1"},
            "--adam-beta2": {"type": float, "dest": "adam_beta2"},
            "--adam-epsilon": {"type": float, "dest": "adam_epsilon"},
            "--batch-size": {"type": int, "dest": "batch_size"},
            "--seed": {"type": int},
        },
    )
    add(
        "eval",
        cmd_eval,
        "score a checkpoint on a labeled corpus",
        {
            "--checkpoint": {"help": "checkpoint to evaluate"},
            "--corpus": {"help": "gold corpus TSV"},
            "--compare": {"help": "second checkpoint for significance testing"},
            "--samples": {"type": int},
            "--seed": {"type": int},
            "--report": {"help": "write the full report here"},
        },
    )
    add(
        "homophily",
        cmd_homophily,
        "run the assortativity rewiring experiment",
        {
            "--edges": {"help": "edge-list file"},
            "--corpus": {"help": "labeled corpus TSV"},
            "--pos-lexicon": {"dest": "pos_lexicon"},
            "--neg-lexicon": {"dest": "neg_lexicon"},
            "--output": {"help": "report file to write"},
            "--epochs": {"type": int},
            "--trials": {"type": int},
            "--seed": {"type": int},
        },
    )
    add(
        "analyze-words",
        cmd_analyze_words,
        "rank lexicon words by per-basis specificity",
        {
            "--checkpoint": {"help": "checkpoint to analyze"},
            "--pos-lexicon": {"dest": "pos_lexicon"},
            "--neg-lexicon": {"dest": "neg_lexicon"},
            "--top-n": {"type": int, "dest": "top_n"},
            "--output": {"help": "write the word lists here"},
        },
    )
    add(
        "synth",
        cmd_synth,
        "generate a planted-community benchmark dataset",
        {
            "--output-dir": {"dest": "output_dir"},
            "--nodes-per-community": {"type": int, "dest": "nodes_per_community"},
            "--intra-edge-prob": {"type": float, "dest": "intra_edge_prob"},
            "--inter-edge-prob": {"type": float, "dest": "inter_edge_prob"},
            "--flip-words": {"dest": "flip_words", "help": "comma-separated"},
            "--docs-per-author": {"type": int, "dest": "docs_per_author"},
            "--vocab-size": {"type": int, "dest": "vocab_size"},
            "--word-dim": {"type": int, "dest": "word_dim"},
            "--flip-doc-fraction": {"type": float, "dest": "flip_doc_fraction"},
            "--seed": {"type": int},
        },
    )
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        logger.exception("unhandled failure")
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
