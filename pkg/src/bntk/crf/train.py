"""L2-regularized maximum-likelihood training for the linear-chain CRF."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize

from .data import LabeledSequence
from .features import DEFAULT_TEMPLATES, check_templates, extract_features
from .model import CrfModel, forward_backward, viterbi

log = logging.getLogger(__name__)


class DivergenceError(RuntimeError):
    pass


@dataclass
class CrfTrainConfig:
    l2: float = 1e-3
    max_iters: int = 100
    history: int = 10
    tol: float = 1e-5
    templates: tuple[str, ...] = DEFAULT_TEMPLATES


class _Batch:
    """Sequences bucketed by length, with their feature matrices stacked."""

    def __init__(self, model: CrfModel, batch: Sequence[LabeledSequence]):
        by_len = defaultdict(list)
        for seq in batch:
            by_len[len(seq)].append(seq)
        self.groups = []
        for T in sorted(by_len):
            seqs = by_len[T]
            X = sp.vstack([model.feature_matrix(s.tokens) for s in seqs], format="csr")
            Y = np.stack([model.label_ids(s.labels) for s in seqs])
            self.groups.append((T, X, Y))
        L = model.n_labels
        # observed feature and transition counts are constant over training
        self.observed_emit = np.zeros((model.n_features, L))
        self.observed_trans = np.zeros((L, L))
        for T, X, Y in self.groups:
            onehot = np.zeros((Y.size, L))
            onehot[np.arange(Y.size), Y.ravel()] = 1.0
            self.observed_emit += X.T @ onehot
            if T > 1:
                np.add.at(self.observed_trans, (Y[:, :-1].ravel(), Y[:, 1:].ravel()), 1.0)


def _objective(model: CrfModel, data: _Batch, l2: float) -> tuple[float, np.ndarray]:
    W, Tr = model.emission_weights, model.transition_weights
    L = model.n_labels
    loss = 0.0
    exp_emit = np.zeros_like(W)
    exp_trans = np.zeros_like(Tr)
    for T, X, Y in data.groups:
        B = Y.shape[0]
        E = np.asarray(X @ W).reshape(B, T, L)
        log_z, nodes, edges = forward_backward(E, Tr)
        gold = np.take_along_axis(E, Y[:, :, None], axis=2).sum(axis=(1, 2))
        if T > 1:
            gold += Tr[Y[:, :-1], Y[:, 1:]].sum(axis=1)
        loss += float(np.sum(log_z - gold))
        exp_emit += X.T @ nodes.reshape(B * T, L)
        exp_trans += edges
    w = model.weights
    loss += 0.5 * l2 * float(w @ w)
    grad = np.concatenate([(exp_emit - data.observed_emit).ravel(), (exp_trans - data.observed_trans).ravel()])
    grad += l2 * w
    return loss, grad


def nll_and_gradient(model: CrfModel, batch: Sequence[LabeledSequence], l2: float = 0.0) -> tuple[float, np.ndarray]:
    """Regularized negative log-likelihood of ``batch`` and its gradient w.r.t. ``model.weights``."""
    if not batch:
        raise ValueError("empty batch")
    return _objective(model, _Batch(model, batch), l2)


def build_feature_map(data: Sequence[LabeledSequence], templates=DEFAULT_TEMPLATES) -> dict[str, int]:
    fmap: dict[str, int] = {}
    for seq in data:
        for pos in range(len(seq)):
            for feat in extract_features(seq.tokens, pos, templates):
                if feat not in fmap:
                    fmap[feat] = len(fmap)
    return fmap


def train_crf(data: Sequence[LabeledSequence], cfg: CrfTrainConfig | None = None) -> CrfModel:
    """Fit a CRF with L-BFGS; labels are sorted, features indexed in first-seen order.

    The accepted-iterate losses are kept in ``model.loss_history``.
    """
    cfg = cfg or CrfTrainConfig()
    if not data:
        raise ValueError("no training data")
    templates = check_templates(cfg.templates)
    labels = sorted({lab for seq in data for lab in seq.labels})
    model = CrfModel.zeros(labels, build_feature_map(data, templates), templates)
    batch = _Batch(model, data)
    log.info("training CRF: %d sequences, %d labels, %d features", len(data), len(labels), model.n_features)

    def fun(w):
        model.weights = w
        loss, grad = _objective(model, batch, cfg.l2)
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise DivergenceError("non-finite loss or gradient during CRF training")
        return loss, grad

    history = [fun(model.weights.copy())[0]]

    def record(intermediate_result):
        history.append(float(intermediate_result.fun))

    result = minimize(
        fun,
        np.zeros(model.n_weights),
        jac=True,
        method="L-BFGS-B",
        callback=record,
        options={"maxiter": cfg.max_iters, "maxcor": cfg.history, "ftol": cfg.tol, "gtol": 1e-8},
    )
    log.info("L-BFGS stopped after %d iterations: %s", result.nit, result.message)
    model.weights = np.asarray(result.x, dtype=np.float64)
    model.loss_history = history
    return model


def tag(model: CrfModel, tokens: Sequence[str]) -> LabeledSequence:
    if not tokens:
        raise ValueError("cannot tag an empty token list")
    labels, _ = viterbi(model, list(tokens))
    return LabeledSequence(tokens, labels)
