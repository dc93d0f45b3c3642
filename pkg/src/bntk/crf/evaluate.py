"""Token-level precision/recall/F1 for POS and NER output."""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .data import LabeledSequence
from .model import CrfModel
from .train import tag

OUTSIDE = "O"
SCHEMES = ("token-all", "token-nonO")


@dataclass(frozen=True)
class LabelScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    per_label: dict[str, LabelScore] = field(default_factory=dict)

    def line(self) -> str:
        return f"{self.precision:.2f}\t{self.recall:.2f}\t{self.f1:.2f}"


def _pct(hits: int, total: int, misses_other_side: int) -> float:
    # 0/0 counts as perfect only when the other side has no errors either
    if total == 0:
        return 100.0 if misses_other_side == 0 else 0.0
    return 100.0 * hits / total


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = _pct(tp, tp + fp, fn)
    r = _pct(tp, tp + fn, fp)
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def score(gold: Sequence[Sequence[str]], pred: Sequence[Sequence[str]], scheme: str = "token-all") -> EvalReport:
    """Micro-averaged scores over aligned gold/predicted label sequences.

    ``token-all`` treats every token as a positive, so precision, recall and
    F1 all equal accuracy. ``token-nonO`` only counts non-``O`` labels as
    positives, on either side.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    tp, fp, fn, support = Counter(), Counter(), Counter(), Counter()
    for g_seq, p_seq in zip(gold, pred, strict=True):
        for g, p in zip(g_seq, p_seq, strict=True):
            support[g] += 1
            if g == p:
                tp[g] += 1
            else:
                fp[p] += 1
                fn[g] += 1
    counted = sorted(set(tp) | set(fp) | set(fn))
    if scheme == "token-nonO":
        counted = [lab for lab in counted if lab != OUTSIDE]
    per_label = {lab: LabelScore(*_prf(tp[lab], fp[lab], fn[lab]), support[lab]) for lab in counted}
    p, r, f1 = _prf(sum(tp[lab] for lab in counted), sum(fp[lab] for lab in counted), sum(fn[lab] for lab in counted))
    return EvalReport(p, r, f1, per_label)


def evaluate(model: CrfModel, test: Sequence[LabeledSequence], scheme: str = "token-all") -> EvalReport:
    if not test:
        raise ValueError("empty test set")
    known = set(model.labels)
    unknown = sorted({lab for seq in test for lab in seq.labels} - known)
    if unknown:
        warnings.warn(f"gold labels unknown to the model count as misses: {', '.join(unknown)}", stacklevel=2)
    pred = [tag(model, seq.tokens).labels for seq in test]
    return score([seq.labels for seq in test], pred, scheme)
