"""Labeled sequence data: TSV reading/writing and the train/test split."""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np


class TsvParseError(ValueError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class LabeledSequence:
    tokens: tuple[str, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.tokens) != len(self.labels):
            raise ValueError(f"{len(self.tokens)} tokens but {len(self.labels)} labels")
        if not self.tokens:
            raise ValueError("empty sequence")

    def __len__(self) -> int:
        return len(self.tokens)


def load_tsv(path: Union[str, Path]) -> list[LabeledSequence]:
    """Read ``token<TAB>label`` lines; a blank line ends a sentence, ``#`` lines are comments."""
    sequences = []
    tokens: list[str] = []
    labels: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if line.startswith("#"):
                continue
            if not line.strip():
                if tokens:
                    sequences.append(LabeledSequence(tokens, labels))
                    tokens, labels = [], []
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise TsvParseError(path, lineno, f"expected 'token<TAB>label', got {len(fields)} field(s)")
            tokens.append(unicodedata.normalize("NFC", fields[0]))
            labels.append(unicodedata.normalize("NFC", fields[1]))
    if tokens:
        sequences.append(LabeledSequence(tokens, labels))
    return sequences


def write_tsv(sequences: Iterable[LabeledSequence], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for seq in sequences:
            for tok, lab in zip(seq.tokens, seq.labels):
                fh.write(f"{tok}\t{lab}\n")
            fh.write("\n")


def split_train_test(data: Sequence, ratio: float = 0.75, seed: int = 0) -> tuple[list, list]:
    """Seeded shuffle, then the first ``floor(ratio * n)`` items become the training set."""
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    n = len(data)
    if n < 2:
        raise ValueError("need at least two items to split")
    order = np.random.default_rng(seed).permutation(n)
    cut = math.floor(ratio * n)
    return [data[i] for i in order[:cut]], [data[i] for i in order[cut:]]
