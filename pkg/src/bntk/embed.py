"""Skip-gram embeddings with negative sampling, with optional character n-gram subwords.

In ``word`` mode each vocabulary word owns one input row. In ``subword`` mode
the input matrix also holds ``buckets`` hashed n-gram rows, and a word's
vector is the mean of its own row and its n-gram rows, which lets
out-of-vocabulary words get a vector from their n-grams alone.
"""

from __future__ import annotations

import logging
import threading
import unicodedata
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .tokenize import basic_tokenize

log = logging.getLogger(__name__)

NOISE_EXPONENT = 0.75
HEADER = "#embed v1"
FNV_OFFSET = 0x811C9DC5
FNV_PRIME = 0x01000193


class TrainingError(ValueError):
    pass


class NotInVocabularyError(KeyError):
    def __init__(self, word: str):
        super().__init__(word)
        self.word = word

    def __str__(self) -> str:
        return f"word {self.word!r} not in vocabulary"


class UndefinedSimilarityError(ValueError):
    pass


@dataclass
class EmbedTrainConfig:
    dim: int = 300
    window: int = 5
    min_count: int = 1
    lr: float = 0.05
    epochs: int = 5
    negatives: int = 5
    mode: str = "word"
    min_n: int = 3
    max_n: int = 6
    buckets: int = 2**21
    seed: int = 0
    max_steps: int | None = None  # center positions; overrides epochs when set
    workers: int = 1  # >1 trains lock-free and gives up determinism

    def __post_init__(self):
        if self.dim <= 0 or self.window < 1 or self.lr <= 0 or self.epochs < 1:
            raise ValueError("need dim > 0, window >= 1, lr > 0, epochs >= 1")
        if self.mode not in ("word", "subword"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.min_n > self.max_n or self.min_n < 1:
            raise ValueError("need 1 <= min_n <= max_n")
        if self.negatives < 0 or self.min_count < 1 or self.workers < 1:
            raise ValueError("need negatives >= 0, min_count >= 1, workers >= 1")
        if self.mode == "subword" and self.buckets < 1:
            raise ValueError("subword mode needs buckets >= 1")


def fnv1a_32(text: str) -> int:
    h = FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * FNV_PRIME) & 0xFFFFFFFF
    return h


def subword_ngrams(word: str, min_n: int, max_n: int) -> list[str]:
    """Character n-grams of ``<word>``, position-major, without the full wrapped form."""
    wrapped = f"<{word}>"
    grams = []
    for i in range(len(wrapped)):
        for n in range(min_n, max_n + 1):
            if i + n > len(wrapped):
                break
            gram = wrapped[i : i + n]
            if gram != wrapped:
                grams.append(gram)
    return grams


def _sentences(corpus: Iterable[Union[str, Sequence[str]]]) -> list[list[str]]:
    out = []
    for sentence in corpus:
        if isinstance(sentence, str):
            out.append(basic_tokenize(sentence))
        else:
            out.append([unicodedata.normalize("NFC", t) for t in sentence])
    return out


def build_vocab(corpus, cfg: EmbedTrainConfig) -> tuple[dict[str, tuple[int, int]], np.ndarray]:
    """Vocabulary ``word -> (id, count)`` and the count**0.75 noise distribution.

    Ids follow descending count, ties alphabetical.
    """
    counts: Counter[str] = Counter()
    n_sent = 0
    for tokens in _sentences(corpus):
        counts.update(tokens)
        n_sent += 1
    if not counts:
        raise TrainingError("empty corpus")
    kept = sorted((w for w, c in counts.items() if c >= cfg.min_count), key=lambda w: (-counts[w], w))
    vocab = {w: (i, counts[w]) for i, w in enumerate(kept)}
    return vocab, noise_distribution([counts[w] for w in kept])


def noise_distribution(counts: Sequence[int]) -> np.ndarray:
    weights = np.asarray(counts, dtype=np.float64) ** NOISE_EXPONENT
    return weights / weights.sum() if len(weights) else weights


def log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def sgns_loss_and_grads(center: np.ndarray, outputs: np.ndarray):
    """Negative-sampling loss for one (center, context) pair and its gradients.

    ``outputs`` stacks the context row first and the noise rows after it. The
    loss is ``-log s(u_ctx . v) - sum_k log s(-u_k . v)``; returns
    ``(loss, d_center, d_outputs)``.
    """
    scores = outputs @ center
    signs = np.full(len(outputs), -1.0, dtype=scores.dtype)
    signs[0] = 1.0
    loss = -np.sum(log_sigmoid(signs * scores))
    # d/ds of -log s(sign*s) = -sign * s(-sign*s)
    coef = -signs * (1.0 / (1.0 + np.exp(signs * scores)))
    return loss, coef @ outputs, np.outer(coef, center)


@dataclass
class EmbeddingModel:
    words: list[str]
    counts: list[int]
    input_matrix: np.ndarray
    output_matrix: np.ndarray
    cfg: EmbedTrainConfig
    _index: dict[str, int] = field(init=False, repr=False, compare=False)
    _rows: list[np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._index = {w: i for i, w in enumerate(self.words)}
        self._rows = [self.subword_rows(w, i) for i, w in enumerate(self.words)]

    @property
    def vocab(self) -> dict[str, tuple[int, int]]:
        return {w: (i, c) for i, (w, c) in enumerate(zip(self.words, self.counts))}

    @property
    def subword(self) -> bool:
        return self.cfg.mode == "subword"

    def ngram_rows(self, word: str) -> list[int]:
        base = len(self.words)
        grams = subword_ngrams(word, self.cfg.min_n, self.cfg.max_n)
        return [base + fnv1a_32(g) % self.cfg.buckets for g in grams]

    def subword_rows(self, word: str, word_id: int | None) -> np.ndarray:
        own = [] if word_id is None else [word_id]
        if not self.subword:
            return np.asarray(own, dtype=np.int64)
        return np.asarray(own + self.ngram_rows(word), dtype=np.int64)

    def word_vector(self, word: str) -> np.ndarray:
        word = unicodedata.normalize("NFC", word)
        idx = self._index.get(word)
        if idx is not None:
            rows = self._rows[idx]
        elif self.subword:
            rows = self.subword_rows(word, None)
        else:
            raise NotInVocabularyError(word)
        if len(rows) == 0:
            raise NotInVocabularyError(word)
        return self.input_matrix[rows].mean(axis=0)

    def __contains__(self, word: str) -> bool:
        return unicodedata.normalize("NFC", word) in self._index

    def word_vectors(self) -> np.ndarray:
        """Composed vectors for every vocabulary word, in id order."""
        if not self.subword:
            return self.input_matrix[: len(self.words)].copy()
        return np.stack([self.input_matrix[r].mean(axis=0) for r in self._rows])

    def most_similar(self, word: str, k: int = 10) -> list[tuple[str, float]]:
        return most_similar(self, word, k)

    # --- serialization ------------------------------------------------------

    def to_bytes(self) -> bytes:
        c = self.cfg
        buckets = c.buckets if self.subword else 0
        header = (
            f"{HEADER} mode={c.mode} dim={c.dim} vocab={len(self.words)} buckets={buckets}"
            f" minn={c.min_n} maxn={c.max_n}\n"
        )
        lines = "".join(f"{w}\t{n}\n" for w, n in zip(self.words, self.counts))
        return (
            (header + lines).encode("utf-8")
            + np.ascontiguousarray(self.input_matrix, dtype="<f4").tobytes()
            + np.ascontiguousarray(self.output_matrix, dtype="<f4").tobytes()
        )

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "EmbeddingModel":
        end = data.index(b"\n")
        fields = data[:end].decode("utf-8").split()
        if " ".join(fields[:2]) != HEADER:
            raise ValueError("not an embedding model file")
        meta = dict(f.split("=", 1) for f in fields[2:])
        dim, n, buckets = int(meta["dim"]), int(meta["vocab"]), int(meta["buckets"])
        mode = meta["mode"]
        cfg_kwargs = dict(mode=mode, dim=dim, min_n=int(meta.get("minn", 3)), max_n=int(meta.get("maxn", 6)))
        if mode == "subword":
            cfg_kwargs["buckets"] = buckets
        words, counts = [], []
        pos = end + 1
        for _ in range(n):
            nl = data.index(b"\n", pos)
            word, count = data[pos:nl].decode("utf-8").rsplit("\t", 1)
            words.append(word)
            counts.append(int(count))
            pos = nl + 1
        in_rows = n + (buckets if mode == "subword" else 0)
        in_size = in_rows * dim * 4
        expected = in_size + n * dim * 4
        if len(data) - pos != expected:
            raise ValueError(f"matrix block is {len(data) - pos} bytes, expected {expected}")
        w_in = np.frombuffer(data, dtype="<f4", count=in_rows * dim, offset=pos).reshape(in_rows, dim)
        w_out = np.frombuffer(data, dtype="<f4", count=n * dim, offset=pos + in_size).reshape(n, dim)
        return cls(words, counts, w_in.astype(np.float32), w_out.astype(np.float32), EmbedTrainConfig(**cfg_kwargs))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "EmbeddingModel":
        return cls.from_bytes(Path(path).read_bytes())


def word_vector(model: EmbeddingModel, word: str) -> np.ndarray:
    return model.word_vector(word)


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarityError("cosine similarity of a zero vector")
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


def most_similar(model: EmbeddingModel, word: str, k: int = 10) -> list[tuple[str, float]]:
    """Top-``k`` vocabulary neighbours of ``word`` by cosine, ties alphabetical."""
    if k <= 0:
        return []
    query = model.word_vector(word).astype(np.float64)
    qn = np.linalg.norm(query)
    if qn == 0.0:
        raise UndefinedSimilarityError(f"vector for {word!r} has zero norm")
    vectors = model.word_vectors().astype(np.float64)
    norms = np.linalg.norm(vectors, axis=1)
    word = unicodedata.normalize("NFC", word)
    scored = []
    for i, w in enumerate(model.words):
        if w == word or norms[i] == 0.0:
            continue
        sim = float(np.clip(vectors[i] @ query / (norms[i] * qn), -1.0, 1.0))
        scored.append((w, sim))
    scored.sort(key=lambda ws: (-ws[1], ws[0]))
    return scored[:k]


# --- training ------------------------------------------------------------------


class _NoiseSampler:
    def __init__(self, noise: np.ndarray, rng: np.random.Generator, chunk: int = 65536):
        self.cdf = np.cumsum(noise)
        self.cdf[-1] = 1.0
        self.rng = rng
        self.chunk = chunk
        self.pool = np.empty(0, dtype=np.int64)
        self.pos = 0

    def draw(self, k: int) -> np.ndarray:
        if self.pos + k > len(self.pool):
            u = self.rng.random(max(self.chunk, k))
            self.pool = np.searchsorted(self.cdf, u, side="right")
            self.pos = 0
        out = self.pool[self.pos : self.pos + k]
        self.pos += k
        return out


class _Progress:
    def __init__(self, total: int):
        self.total = max(total, 1)
        self.done = 0
        self.lock = threading.Lock()


def _train_shard(model: EmbeddingModel, sentences, noise, cfg, rng, progress: _Progress, budget: int) -> None:
    w_in, w_out = model.input_matrix, model.output_matrix
    sampler = _NoiseSampler(noise, rng)
    rows_of = model._rows
    k = cfg.negatives
    labels_dim = k + 1
    for sent in sentences:
        n = len(sent)
        if n == 0:
            continue
        spans = rng.integers(1, cfg.window + 1, size=n)
        for pos in range(n):
            if progress.done >= budget:
                return
            lr = np.float32(cfg.lr * (1.0 - 0.9 * min(progress.done / progress.total, 1.0)))
            center = sent[pos]
            rows = rows_of[center]
            b = spans[pos]
            for cpos in range(max(0, pos - b), min(n, pos + b + 1)):
                if cpos == pos:
                    continue
                ctx = sent[cpos]
                targets = np.empty(labels_dim, dtype=np.int64)
                targets[0] = ctx
                targets[1:] = sampler.draw(k)
                v = w_in[rows].mean(axis=0) if len(rows) > 1 else w_in[rows[0]]
                _, d_v, d_u = sgns_loss_and_grads(v, w_out[targets])
                d_u[1:][targets[1:] == ctx] = 0.0
                np.subtract.at(w_out, targets, lr * d_u)
                if len(rows) > 1:
                    np.subtract.at(w_in, rows, (lr / len(rows)) * d_v)
                else:
                    w_in[rows[0]] -= lr * d_v
            progress.done += 1


def train_skipgram(corpus, cfg: EmbedTrainConfig | None = None) -> EmbeddingModel:
    """Train skip-gram with negative sampling.

    With ``workers == 1`` the result is bit-identical for a fixed seed. The
    learning rate decays linearly from ``lr`` to ``lr / 10`` over the run.
    """
    cfg = cfg or EmbedTrainConfig()
    sentences = _sentences(corpus)
    vocab, noise = build_vocab(sentences, cfg)
    if not vocab:
        raise TrainingError("no word reaches min_count")
    words = list(vocab)
    counts = [vocab[w][1] for w in words]
    rng = np.random.default_rng(cfg.seed)
    n_rows = len(words) + (cfg.buckets if cfg.mode == "subword" else 0)
    w_in = ((rng.random((n_rows, cfg.dim), dtype=np.float32) - np.float32(0.5)) / np.float32(cfg.dim)).astype(np.float32)
    w_out = np.zeros((len(words), cfg.dim), dtype=np.float32)
    model = EmbeddingModel(words, counts, w_in, w_out, cfg)

    encoded = [np.asarray([vocab[t][0] for t in s if t in vocab], dtype=np.int64) for s in sentences]
    n_tokens = sum(len(s) for s in encoded)
    budget = cfg.max_steps if cfg.max_steps is not None else cfg.epochs * n_tokens
    progress = _Progress(budget)
    epochs = cfg.epochs if cfg.max_steps is None else max(cfg.epochs, -(-budget // max(n_tokens, 1)))
    for epoch in range(epochs):
        if progress.done >= budget or n_tokens == 0:
            break
        if cfg.workers == 1:
            _train_shard(model, encoded, noise, cfg, rng, progress, budget)
        else:
            shards = [encoded[i :: cfg.workers] for i in range(cfg.workers)]
            seeds = rng.integers(0, 2**63 - 1, size=cfg.workers)
            with ThreadPoolExecutor(cfg.workers) as pool:
                jobs = [
                    pool.submit(_train_shard, model, shard, noise, cfg, np.random.default_rng(int(s)), progress, budget)
                    for shard, s in zip(shards, seeds)
                ]
                for job in jobs:
                    job.result()
        if not (np.isfinite(w_in).all() and np.isfinite(w_out).all()):
            raise TrainingError(f"non-finite weights after epoch {epoch + 1}")
        log.info("epoch %d done, %d steps", epoch + 1, progress.done)
    return model

