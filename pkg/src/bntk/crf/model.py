"""Linear-chain CRF model, exact inference and serialization.

Weights are one flat float64 vector: an ``F x L`` emission block (feature by
label) followed by an ``L x L`` transition block (previous label by label).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from .features import DEFAULT_TEMPLATES, check_templates, extract_features

HEADER = "#crf v1"


@dataclass
class CrfModel:
    labels: list[str]
    feature_map: dict[str, int]
    weights: np.ndarray
    templates: tuple[str, ...] = DEFAULT_TEMPLATES
    loss_history: list[float] = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        self.templates = check_templates(self.templates)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (self.n_weights,):
            raise ValueError(f"expected {self.n_weights} weights, got {self.weights.shape}")
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}

    @classmethod
    def zeros(cls, labels, feature_map, templates=DEFAULT_TEMPLATES) -> "CrfModel":
        n = len(feature_map) * len(labels) + len(labels) ** 2
        return cls(list(labels), dict(feature_map), np.zeros(n), tuple(templates))

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return len(self.feature_map)

    @property
    def n_weights(self) -> int:
        return self.n_features * self.n_labels + self.n_labels**2

    @property
    def emission_weights(self) -> np.ndarray:
        return self.weights[: self.n_features * self.n_labels].reshape(self.n_features, self.n_labels)

    @property
    def transition_weights(self) -> np.ndarray:
        return self.weights[self.n_features * self.n_labels :].reshape(self.n_labels, self.n_labels)

    def label_ids(self, labels: Sequence[str]) -> np.ndarray:
        try:
            return np.array([self._label_index[lab] for lab in labels], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"unknown label {exc.args[0]!r}") from None

    def feature_matrix(self, tokens: Sequence[str]) -> sp.csr_matrix:
        """Binary ``T x F`` indicator matrix; features unseen in training are dropped."""
        indptr, indices = [0], []
        for pos in range(len(tokens)):
            ids = {self.feature_map[f] for f in extract_features(tokens, pos, self.templates) if f in self.feature_map}
            indices.extend(sorted(ids))
            indptr.append(len(indices))
        data = np.ones(len(indices), dtype=np.float64)
        return sp.csr_matrix((data, indices, indptr), shape=(len(tokens), self.n_features))

    def emissions(self, tokens: Sequence[str]) -> np.ndarray:
        return np.asarray(self.feature_matrix(tokens) @ self.emission_weights).reshape(len(tokens), self.n_labels)

    # --- serialization ------------------------------------------------------

    def to_bytes(self) -> bytes:
        lines = [f"{HEADER} labels={self.n_labels} features={self.n_features} templates={','.join(self.templates)}"]
        lines += self.labels
        lines += [f"{feat}\t{idx}" for feat, idx in sorted(self.feature_map.items(), key=lambda fi: fi[1])]
        text = "\n".join(lines) + "\n"
        return text.encode("utf-8") + self.weights.astype("<f8").tobytes()

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "CrfModel":
        pos = 0

        def next_line() -> str:
            nonlocal pos
            nl = data.index(b"\n", pos)
            line = data[pos:nl].decode("utf-8")
            pos = nl + 1
            return line

        fields = next_line().split()
        if " ".join(fields[:2]) != HEADER:
            raise ValueError("not a CRF model file")
        meta = dict(f.split("=", 1) for f in fields[2:])
        n_labels, n_feats = int(meta["labels"]), int(meta["features"])
        templates = tuple(meta["templates"].split(",")) if meta.get("templates") else DEFAULT_TEMPLATES
        labels = [next_line() for _ in range(n_labels)]
        fmap = {}
        for _ in range(n_feats):
            feat, _, idx = next_line().rpartition("\t")
            fmap[feat] = int(idx)
        n_weights = n_feats * n_labels + n_labels**2
        if len(data) - pos != 8 * n_weights:
            raise ValueError(f"weight block is {len(data) - pos} bytes, expected {8 * n_weights}")
        weights = np.frombuffer(data, dtype="<f8", count=n_weights, offset=pos).astype(np.float64)
        return cls(labels, fmap, weights, templates)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CrfModel":
        return cls.from_bytes(Path(path).read_bytes())


# --- inference on score arrays ------------------------------------------------


def path_score(emissions: np.ndarray, transitions: np.ndarray, labels: Sequence[int]) -> float:
    labels = np.asarray(labels)
    score = emissions[np.arange(len(labels)), labels].sum()
    if len(labels) > 1:
        score += transitions[labels[:-1], labels[1:]].sum()
    return float(score)


def forward_backward(emissions: np.ndarray, transitions: np.ndarray):
    """Batched forward-backward over ``(B, T, L)`` emission scores.

    Returns ``(log_z, node_marginals, edge_marginal_sum)`` where the edge
    term is summed over the batch and all positions, shape ``(L, L)``.
    """
    B, T, L = emissions.shape
    alpha = np.empty((B, T, L))
    beta = np.zeros((B, T, L))
    alpha[:, 0] = emissions[:, 0]
    for t in range(1, T):
        alpha[:, t] = logsumexp(alpha[:, t - 1, :, None] + transitions[None], axis=1) + emissions[:, t]
    for t in range(T - 2, -1, -1):
        beta[:, t] = logsumexp(transitions[None] + (emissions[:, t + 1] + beta[:, t + 1])[:, None, :], axis=2)
    log_z = logsumexp(alpha[:, -1], axis=1)
    nodes = np.exp(alpha + beta - log_z[:, None, None])
    edges = np.zeros((L, L))
    for t in range(T - 1):
        scores = (
            alpha[:, t, :, None]
            + transitions[None]
            + (emissions[:, t + 1] + beta[:, t + 1])[:, None, :]
            - log_z[:, None, None]
        )
        edges += np.exp(scores).sum(axis=0)
    return log_z, nodes, edges


def viterbi_path(emissions: np.ndarray, transitions: np.ndarray) -> list[int]:
    """Best label path for one ``(T, L)`` score array; ties go to the lowest label index."""
    T, L = emissions.shape
    delta = emissions[0].copy()
    back = np.zeros((T, L), dtype=np.int64)
    for t in range(1, T):
        cand = delta[:, None] + transitions
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(L)] + emissions[t]
    path = [int(np.argmax(delta))]
    for t in range(T - 1, 0, -1):
        path.append(int(back[t, path[-1]]))
    return path[::-1]


# --- model-level operations ----------------------------------------------------


def sequence_score(model: CrfModel, tokens: Sequence[str], labels: Sequence[str]) -> float:
    if len(tokens) != len(labels):
        raise ValueError("tokens and labels differ in length")
    return path_score(model.emissions(tokens), model.transition_weights, model.label_ids(labels))


def log_partition(model: CrfModel, tokens: Sequence[str]) -> float:
    if not tokens:
        raise ValueError("empty token list")
    log_z, _, _ = forward_backward(model.emissions(tokens)[None], model.transition_weights)
    return float(log_z[0])


def marginals(model: CrfModel, tokens: Sequence[str]) -> np.ndarray:
    """Per-position label marginals, shape ``(T, L)``."""
    _, nodes, _ = forward_backward(model.emissions(tokens)[None], model.transition_weights)
    return nodes[0]


def viterbi(model: CrfModel, tokens: Sequence[str]) -> tuple[list[str], float]:
    if not tokens:
        raise ValueError("empty token list")
    emissions = model.emissions(tokens)
    path = viterbi_path(emissions, model.transition_weights)
    return [model.labels[i] for i in path], path_score(emissions, model.transition_weights, path)
