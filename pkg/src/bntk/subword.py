"""Unigram language-model subword tokenizer.

Training follows the usual recipe: seed a large candidate vocabulary from
frequent substrings, alternate EM re-estimation of piece probabilities with
likelihood-based pruning until the target size is reached, then run one more
EM pass. Text is split on whitespace and each word is prefixed with the
meta-symbol ``▁`` so that decoding can restore the spaces.

All lattice arithmetic is done in log space.
"""

from __future__ import annotations

import logging
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

log = logging.getLogger(__name__)

META = "▁"
UNK = "<unk>"
UNK_PENALTY = 10.0
TIE_EPS = 1e-12
HEADER = "#unigram v1"


class TrainingError(ValueError):
    pass


class ConfigError(ValueError):
    pass


class EncodingError(ValueError):
    """A corpus word cannot be covered by the vocabulary's pieces."""


@dataclass
class SubwordTrainConfig:
    vocab_size: int = 50000
    seed_size: int | None = None
    shrink_factor: float = 0.75
    max_piece_len: int = 16
    em_iters_per_round: int = 2

    def __post_init__(self):
        if self.seed_size is None:
            self.seed_size = 8 * self.vocab_size
        if not 0.0 < self.shrink_factor < 1.0:
            raise ConfigError("shrink_factor must lie in (0, 1)")
        if self.vocab_size < 1 or self.max_piece_len < 1 or self.em_iters_per_round < 1:
            raise ConfigError("vocab_size, max_piece_len and em_iters_per_round must be positive")


@dataclass
class SubwordVocab:
    """Ordered ``(piece, log-probability)`` table.

    Piece ids are list positions. Characters outside the vocabulary encode to
    ``<unk>``, whose id is one past the last piece.
    """

    pieces: list[tuple[str, float]]
    meta: str = META
    _index: dict[str, int] = field(init=False, repr=False, compare=False)
    _table: dict[str, float] = field(init=False, repr=False, compare=False)
    _unk_logp: float = field(init=False, repr=False, compare=False)
    _max_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.pieces = [(p, float(lp)) for p, lp in self.pieces]
        self._index = {}
        for i, (piece, _) in enumerate(self.pieces):
            if not piece:
                raise ValueError("empty piece")
            if piece in self._index:
                raise ValueError(f"duplicate piece {piece!r}")
            self._index[piece] = i
        self._table = dict(self.pieces)
        finite = [lp for _, lp in self.pieces if lp > -math.inf]
        self._unk_logp = (min(finite) if finite else 0.0) - UNK_PENALTY
        self._max_len = max((len(p) for p, _ in self.pieces), default=1)

    def __len__(self) -> int:
        return len(self.pieces)

    def __contains__(self, piece: object) -> bool:
        return piece in self._index

    @property
    def unk_id(self) -> int:
        return len(self.pieces)

    @property
    def table(self) -> dict[str, float]:
        return self._table

    @property
    def max_len(self) -> int:
        return self._max_len

    def piece_id(self, piece: str) -> int:
        return self._index.get(piece, self.unk_id)

    def total_probability(self) -> float:
        return math.fsum(math.exp(lp) for _, lp in self.pieces)

    def to_text(self) -> str:
        lines = [f"{HEADER} vocab_size={len(self.pieces)}"]
        lines += [f"{piece}\t{logp!r}" for piece, logp in self.pieces]
        return "\n".join(lines) + "\n"

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_bytes(self.to_text().encode("utf-8"))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SubwordVocab":
        lines = Path(path).read_bytes().decode("utf-8").split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or not lines[0].startswith(HEADER + " vocab_size="):
            raise ValueError(f"{path}: missing '{HEADER}' header")
        n = int(lines[0].rsplit("=", 1)[1])
        pieces = []
        for lineno, line in enumerate(lines[1:], start=2):
            piece, sep, logp = line.rpartition("\t")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'piece<TAB>logp'")
            pieces.append((piece, float(logp)))
        if len(pieces) != n:
            raise ValueError(f"{path}: header says {n} pieces, found {len(pieces)}")
        return cls(pieces)


def _logsumexp(values: Sequence[float]) -> float:
    if not values:
        return -math.inf
    m = max(values)
    if m == -math.inf:
        return m
    return m + math.log(math.fsum(math.exp(v - m) for v in values))


def word_units(corpus: Iterable[str]) -> list[tuple[str, int]]:
    """Distinct ``▁word`` units with their corpus frequencies, sorted."""
    counts: Counter[str] = Counter()
    for sentence in corpus:
        for word in unicodedata.normalize("NFC", sentence).split():
            counts[META + word] += 1
    return sorted(counts.items())


def _as_units(corpus) -> list[tuple[str, int]]:
    if isinstance(corpus, _Units):
        return corpus.units
    return word_units(corpus)


class _Units:
    """Pre-counted corpus, so training loops don't re-split the text."""

    def __init__(self, units: list[tuple[str, int]]):
        self.units = units


# --- seeding -----------------------------------------------------------------


def seed_candidates(units: Sequence[tuple[str, int]], max_piece_len: int) -> Counter:
    counts: Counter[str] = Counter()
    for unit, freq in units:
        n = len(unit)
        for i in range(n):
            for j in range(i + 1, min(n, i + max_piece_len) + 1):
                counts[unit[i:j]] += freq
    return counts


def seed_vocab(corpus, cfg: SubwordTrainConfig) -> SubwordVocab:
    """Initial vocabulary: the most frequent-and-long substrings plus every character."""
    units = _as_units(corpus)
    if not units:
        raise TrainingError("empty corpus")
    counts = seed_candidates(units, cfg.max_piece_len)
    chars = {p: c for p, c in counts.items() if len(p) == 1}
    multi = sorted(
        ((p, c) for p, c in counts.items() if len(p) > 1),
        key=lambda pc: (-pc[1] * len(pc[0]), pc[0]),
    )
    multi = multi[: max(0, cfg.seed_size - len(chars))]
    chosen = list(chars.items()) + multi
    log_total = math.log(sum(c for _, c in chosen))
    pieces = [(p, math.log(c) - log_total) for p, c in chosen]
    pieces.sort(key=lambda pl: (-pl[1], pl[0]))
    return SubwordVocab(pieces)


# --- lattice -----------------------------------------------------------------


def _lattice(unit: str, table: dict[str, float], max_len: int) -> list[list[tuple[int, str, float]]]:
    """``edges[j]`` lists ``(start, piece, logp)`` for pieces ending at ``j``."""
    n = len(unit)
    edges: list[list[tuple[int, str, float]]] = [[] for _ in range(n + 1)]
    for i in range(n):
        for j in range(i + 1, min(n, i + max_len) + 1):
            piece = unit[i:j]
            lp = table.get(piece)
            if lp is not None:
                edges[j].append((i, piece, lp))
    return edges


def _forward_backward(unit: str, table: dict[str, float], max_len: int):
    n = len(unit)
    edges = _lattice(unit, table, max_len)
    alpha = [-math.inf] * (n + 1)
    alpha[0] = 0.0
    for j in range(1, n + 1):
        alpha[j] = _logsumexp([alpha[i] + lp for i, _, lp in edges[j]])
    beta = [-math.inf] * (n + 1)
    beta[n] = 0.0
    outgoing: list[list[tuple[int, float]]] = [[] for _ in range(n + 1)]
    for j in range(1, n + 1):
        for i, _, lp in edges[j]:
            outgoing[i].append((j, lp))
    for i in range(n - 1, -1, -1):
        beta[i] = _logsumexp([lp + beta[j] for j, lp in outgoing[i]])
    return edges, alpha, beta


def word_log_likelihood(vocab: SubwordVocab, unit: str) -> float:
    """log of the total probability of all segmentations of ``unit``."""
    _, alpha, _ = _forward_backward(unit, vocab.table, vocab.max_len)
    return alpha[-1]


def expected_counts(vocab: SubwordVocab, corpus) -> tuple[dict[str, float], float]:
    """E-step: expected piece counts and the corpus log-likelihood."""
    table, max_len = vocab.table, vocab.max_len
    counts = dict.fromkeys(table, 0.0)
    terms = []
    for unit, freq in _as_units(corpus):
        edges, alpha, beta = _forward_backward(unit, table, max_len)
        z = alpha[-1]
        if z == -math.inf:
            raise EncodingError(f"cannot segment {unit[1:]!r} with this vocabulary")
        terms.append(freq * z)
        for j, ends in enumerate(edges):
            for i, piece, lp in ends:
                post = alpha[i] + lp + beta[j] - z
                if post > -math.inf:
                    counts[piece] += freq * math.exp(post)
    return counts, math.fsum(terms)


def em_step(vocab: SubwordVocab, corpus) -> tuple[SubwordVocab, float]:
    """One EM iteration. The returned log-likelihood is that of the input vocab."""
    counts, loglik = expected_counts(vocab, corpus)
    log_total = math.log(math.fsum(counts.values()))
    pieces = []
    for piece, _ in vocab.pieces:
        c = counts[piece]
        pieces.append((piece, math.log(c) - log_total if c > 0 else -math.inf))
    return SubwordVocab(pieces), loglik


def corpus_log_likelihood(vocab: SubwordVocab, corpus) -> float:
    table, max_len = vocab.table, vocab.max_len
    return math.fsum(freq * _forward_backward(unit, table, max_len)[1][-1] for unit, freq in _as_units(corpus))


# --- viterbi -------------------------------------------------------------------


def _better(cand: tuple[float, int, int], best: tuple[float, int, int] | None) -> bool:
    """Order on (score, n_pieces, first_piece_len): higher score, fewer pieces, longer first piece."""
    if best is None:
        return True
    s, c, length = cand
    bs, bc, blen = best
    if s != bs:
        if math.isinf(s) or math.isinf(bs) or abs(s - bs) > TIE_EPS * max(1.0, abs(s), abs(bs)):
            return s > bs
    if c != bc:
        return c < bc
    return length > blen


def viterbi_segment(vocab: SubwordVocab, unit: str, exclude: str | None = None) -> tuple[list[str], float]:
    """Best segmentation of ``unit`` and its score.

    The search runs right to left so that the leftmost-longest tie rule only
    has to compare first pieces. Characters missing from the vocabulary become
    ``<unk>`` with a score well below the least likely piece.
    """
    table, max_len, unk_lp = vocab.table, vocab.max_len, vocab._unk_logp
    n = len(unit)
    best: list[tuple[float, int, int] | None] = [None] * (n + 1)
    best[n] = (0.0, 0, 0)
    choice = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, min(n, i + max_len) + 1):
            piece = unit[i:j]
            lp = table.get(piece) if piece != exclude else None
            if lp is None:
                if j != i + 1 or unit[i] in table:
                    continue
                lp = unk_lp
            rest = best[j]
            cand = (lp + rest[0], rest[1] + 1, j - i)
            if _better(cand, best[i]):
                best[i] = cand
                choice[i] = j
    pieces = []
    i = 0
    while i < n:
        j = choice[i]
        piece = unit[i:j]
        pieces.append(piece if piece in table and piece != exclude else UNK)
        i = j
    return pieces, best[0][0]


def encode(vocab: SubwordVocab, text: str) -> list[str]:
    """Segment ``text`` into pieces; each word gets the ``▁`` prefix."""
    pieces: list[str] = []
    for word in unicodedata.normalize("NFC", text).split():
        pieces.extend(viterbi_segment(vocab, vocab.meta + word)[0])
    return pieces


def encode_ids(vocab: SubwordVocab, text: str) -> list[int]:
    return [vocab.piece_id(p) for p in encode(vocab, text)]


def decode(pieces: Sequence[str], meta: str = META) -> str:
    text = "".join(pieces).replace(meta, " ")
    return text[1:] if text.startswith(" ") else text


# --- pruning -------------------------------------------------------------------


def piece_losses(vocab: SubwordVocab, corpus) -> dict[str, float]:
    """Approximate corpus log-likelihood lost by removing each multi-character piece.

    A removed piece's expected count is handed to the pieces of its best
    alternative segmentation, and the change in the likelihood contribution of
    that mass is the loss. Pieces that are never used get ``-inf``.
    """
    freq, _ = expected_counts(vocab, corpus)
    total = math.fsum(freq.values())
    losses = {}
    for piece, _ in vocab.pieces:
        if len(piece) == 1:
            continue
        f = freq[piece]
        if f <= 0.0:
            losses[piece] = -math.inf
            continue
        alt, _ = viterbi_segment(vocab, piece, exclude=piece)
        logp_piece = math.log(f) - math.log(total)
        logsum_alt = math.log(total + f * (len(alt) - 1))
        logp_alt = sum(math.log(freq.get(a, 0.0) + f) - logsum_alt for a in alt)
        losses[piece] = (f / total) * (logp_piece - logp_alt)
    return losses


def _normalized(pieces: list[tuple[str, float]]) -> list[tuple[str, float]]:
    z = _logsumexp([lp for _, lp in pieces])
    return [(p, lp - z) for p, lp in pieces]


def prune(vocab: SubwordVocab, corpus, cfg: SubwordTrainConfig) -> SubwordVocab:
    """Drop the least useful multi-character pieces; single characters always stay."""
    if len(vocab) <= cfg.vocab_size:
        return vocab
    losses = piece_losses(vocab, corpus)
    n_single = len(vocab) - len(losses)
    keep_n = max(cfg.vocab_size - n_single, int(cfg.shrink_factor * len(losses)))
    ranked = sorted(losses, key=lambda p: (-losses[p], p))
    kept = set(ranked[:keep_n])
    pieces = [(p, lp) for p, lp in vocab.pieces if len(p) == 1 or p in kept]
    return SubwordVocab(_normalized(pieces))


# --- training ------------------------------------------------------------------


def _floored(vocab: SubwordVocab) -> SubwordVocab:
    """Give pieces EM drove to zero a small finite probability.

    Pruning can remove every longer piece that covered a dead character,
    which would leave words with no segmentation at all.
    """
    if all(lp > -math.inf for _, lp in vocab.pieces):
        return vocab
    floor = min(lp for _, lp in vocab.pieces if lp > -math.inf) - UNK_PENALTY
    return SubwordVocab(_normalized([(p, lp if lp > -math.inf else floor) for p, lp in vocab.pieces]))


def _finalize(vocab: SubwordVocab) -> SubwordVocab:
    pieces = sorted(_floored(vocab).pieces, key=lambda pl: (-pl[1], pl[0]))
    return SubwordVocab(pieces)


def train_unigram(corpus: Iterable[str], cfg: SubwordTrainConfig | None = None) -> SubwordVocab:
    cfg = cfg or SubwordTrainConfig()
    units = _Units(word_units(corpus))
    if not units.units:
        raise TrainingError("empty corpus")
    n_chars = len({ch for unit, _ in units.units for ch in unit})
    if cfg.vocab_size < n_chars:
        raise ConfigError(f"vocab_size {cfg.vocab_size} is below the {n_chars} distinct corpus characters")
    vocab = seed_vocab(units, cfg)
    log.info("seeded %d candidate pieces", len(vocab))
    while len(vocab) > cfg.vocab_size:
        for _ in range(cfg.em_iters_per_round):
            vocab, loglik = em_step(vocab, units)
        vocab = _floored(prune(vocab, units, cfg))
        log.info("pruned to %d pieces (log-likelihood %.3f)", len(vocab), loglik)
    vocab, _ = em_step(vocab, units)
    return _finalize(vocab)


def prepared(corpus: Iterable[str]) -> _Units:
    """Count a corpus once for repeated ``em_step``/``prune`` calls."""
    return _Units(word_units(corpus))
