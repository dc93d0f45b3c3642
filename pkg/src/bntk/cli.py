"""Command-line entry point.

Every subcommand takes ``--config FILE`` with ``key = value`` lines whose keys
are the subcommand's long flag names. Precedence: built-in defaults, then the
config file, then flags on the command line.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import embed, subword
from .core import LexiconLoadError, file_stats
from .crf import CrfModel, CrfTrainConfig, evaluate, load_tsv, split_train_test, tag, train_crf
from .tokenize import basic_tokenize, sentence_tokenize

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
TASK_SCHEMES = {"pos": "token-all", "ner": "token-nonO"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def read_config(path: str | Path) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(sub: argparse.ArgumentParser, values: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    defaults = {}
    for key, raw in values.items():
        action = actions.get(key)
        if action is None:
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            value = action.type(raw) if action.type else raw
            if action.choices and value not in action.choices:
                raise UsageError(f"config key {key!r}: {value!r} not in {list(action.choices)}")
            defaults[key] = value
    sub.set_defaults(**defaults)


def _need(ns, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(ns, n) is None]
    if missing:
        raise UsageError(f"{ns.command}: missing required option(s): {', '.join(missing)}")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="bntk", description="Bengali tokenization, embeddings and CRF tagging")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)
    cmds = {}

    def add(name, help):
        p = subs.add_parser(name, help=help)
        p.add_argument("--config", help="key = value file with option defaults")
        cmds[name] = p
        return p

    p = add("tokenize", "split text into tokens, sentences or subword pieces")
    p.add_argument("--method", choices=["basic", "sentence", "subword"], default="basic")
    p.add_argument("--model", help="subword vocab file (for --method subword)")
    p.add_argument("--text", help="text to tokenize instead of stdin")

    p = add("subword-train", "train a unigram subword vocabulary")
    p.add_argument("--input", help="UTF-8 text, one sentence per line")
    p.add_argument("--vocab-size", type=int, default=50000)
    p.add_argument("--seed-size", type=int)
    p.add_argument("--shrink-factor", type=float, default=0.75)
    p.add_argument("--max-piece-len", type=int, default=16)
    p.add_argument("--em-iters", type=int, default=2)
    p.add_argument("--out")

    p = add("embed-train", "train skip-gram word or subword embeddings")
    p.add_argument("--mode", choices=["word", "subword"], default="word")
    p.add_argument("--input")
    p.add_argument("--out")
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--min-n", type=int, default=3)
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--buckets", type=int, default=2**21)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = add("embed-query", "nearest neighbours of a word")
    p.add_argument("--model")
    p.add_argument("--word")
    p.add_argument("--topk", type=int, default=10)

    p = add("crf-train", "train a CRF POS or NER tagger")
    p.add_argument("--task", choices=sorted(TASK_SCHEMES), default="pos")
    p.add_argument("--train")
    p.add_argument("--test")
    p.add_argument("--split", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--l2", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--out")

    p = add("crf-tag", "tag text with a trained CRF model")
    p.add_argument("--model")
    p.add_argument("--text")
    p.add_argument("--stdin", action="store_true")

    p = add("crf-eval", "score a CRF model on a labeled TSV file")
    p.add_argument("--model")
    p.add_argument("--test")
    p.add_argument("--scheme", choices=["token-all", "token-nonO"], default="token-all")

    p = add("stats", "count documents, sentences and tokens")
    p.add_argument("--input")
    return parser, cmds


def _input_lines(ns, stdin) -> list[str]:
    text = ns.text if getattr(ns, "text", None) is not None else stdin.read()
    return text.splitlines()


def _read_sentences(path: str) -> list[str]:
    return [line for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]


def _escape(token: str) -> str:
    return token.replace("/", "\\/")


def _tokenize(ns, stdin) -> list[str]:
    lines = _input_lines(ns, stdin)
    if ns.method == "basic":
        return [" ".join(basic_tokenize(line)) for line in lines]
    if ns.method == "sentence":
        return [s for line in lines for s in sentence_tokenize(line)]
    _need(ns, "model")
    vocab = subword.SubwordVocab.load(ns.model)
    return [" ".join(subword.encode(vocab, line)) for line in lines]


def _subword_train(ns, stdin) -> list[str]:
    _need(ns, "input", "out")
    cfg = subword.SubwordTrainConfig(
        vocab_size=ns.vocab_size,
        seed_size=ns.seed_size,
        shrink_factor=ns.shrink_factor,
        max_piece_len=ns.max_piece_len,
        em_iters_per_round=ns.em_iters,
    )
    vocab = subword.train_unigram(_read_sentences(ns.input), cfg)
    vocab.save(ns.out)
    return []


def _embed_train(ns, stdin) -> list[str]:
    _need(ns, "input", "out")
    cfg = embed.EmbedTrainConfig(
        dim=ns.dim, window=ns.window, min_count=ns.min_count, lr=ns.lr, epochs=ns.epochs,
        negatives=ns.negatives, mode=ns.mode, min_n=ns.min_n, max_n=ns.max_n, buckets=ns.buckets,
        seed=ns.seed, max_steps=ns.max_steps, workers=ns.workers,
    )
    model = embed.train_skipgram(_read_sentences(ns.input), cfg)
    model.save(ns.out)
    return []


def _embed_query(ns, stdin) -> list[str]:
    _need(ns, "model", "word")
    model = embed.EmbeddingModel.load(ns.model)
    return [f"{w}\t{sim:.6f}" for w, sim in embed.most_similar(model, ns.word, ns.topk)]


def _crf_train(ns, stdin) -> list[str]:
    _need(ns, "train", "out")
    if ns.test is not None and ns.split is not None:
        raise UsageError("crf-train: use either --test or --split, not both")
    train = load_tsv(ns.train)
    test = load_tsv(ns.test) if ns.test else None
    if ns.split is not None:
        train, test = split_train_test(train, ns.split, ns.seed)
    model = train_crf(train, CrfTrainConfig(l2=ns.l2, max_iters=ns.max_iters))
    model.save(ns.out)
    if test:
        return [evaluate(model, test, TASK_SCHEMES[ns.task]).line()]
    return []


def _crf_tag(ns, stdin) -> list[str]:
    _need(ns, "model")
    if ns.text is not None and ns.stdin:
        raise UsageError("crf-tag: use either --text or --stdin")
    model = CrfModel.load(ns.model)
    out = []
    for line in _input_lines(ns, stdin):
        tokens = basic_tokenize(line)
        if not tokens:
            out.append("")
            continue
        seq = tag(model, tokens)
        out.append(" ".join(f"{_escape(t)}/{lab}" for t, lab in zip(seq.tokens, seq.labels)))
    return out


def _crf_eval(ns, stdin) -> list[str]:
    _need(ns, "model", "test")
    model = CrfModel.load(ns.model)
    return [evaluate(model, load_tsv(ns.test), ns.scheme).line()]


def _stats(ns, stdin) -> list[str]:
    _need(ns, "input")
    s = file_stats(ns.input)
    return [f"{s.documents}\t{s.sentences}\t{s.tokens}"]


COMMANDS = {
    "tokenize": _tokenize,
    "subword-train": _subword_train,
    "embed-train": _embed_train,
    "embed-query": _embed_query,
    "crf-train": _crf_train,
    "crf-tag": _crf_tag,
    "crf-eval": _crf_eval,
    "stats": _stats,
}


def run(argv: Sequence[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser, cmds = build_parser()
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise UsageError("missing subcommand; see --help")
        if ns.config:
            _apply_config(cmds[ns.command], read_config(ns.config))
            ns = parser.parse_args(argv)
        lines = COMMANDS[ns.command](ns, stdin)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except (ValueError, KeyError, RuntimeError, OSError, LexiconLoadError) as exc:
        print(f"bntk: error: {exc}", file=stderr)
        return EXIT_DATA
    for line in lines:
        stdout.write(line + "\n")
    stdout.flush()
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
