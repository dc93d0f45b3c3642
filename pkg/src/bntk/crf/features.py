"""Per-token feature templates for the CRF tagger."""

from __future__ import annotations

import unicodedata
from typing import Callable, Sequence

from ..tokenize import SPLIT_PUNCTUATION

BOS = "BOS"
EOS = "EOS"


def _affixes(tok: str, kind: str) -> list[str]:
    out = []
    for n in range(1, min(3, len(tok)) + 1):
        out.append(f"{kind}{n}={tok[:n] if kind == 'p' else tok[-n:]}")
    return out


def _is_punct(tok: str) -> bool:
    return bool(tok) and all(ch in SPLIT_PUNCTUATION or unicodedata.category(ch).startswith("P") for ch in tok)


_TEMPLATES: dict[str, Callable[[Sequence[str], int], list[str]]] = {
    "bias": lambda toks, i: ["bias"],
    "word": lambda toks, i: [f"w={toks[i]}"],
    "lower": lambda toks, i: [f"lw={toks[i].lower()}"],
    "prefix": lambda toks, i: _affixes(toks[i], "p"),
    "suffix": lambda toks, i: _affixes(toks[i], "s"),
    "digit": lambda toks, i: ["has_digit"] if any(ch.isdigit() for ch in toks[i]) else [],
    "punct": lambda toks, i: ["is_punct"] if _is_punct(toks[i]) else [],
    "prev_word": lambda toks, i: [f"prev_w={toks[i - 1]}"] if i > 0 else [BOS],
    "next_word": lambda toks, i: [f"next_w={toks[i + 1]}"] if i < len(toks) - 1 else [EOS],
    "boundary": lambda toks, i: ([BOS] if i == 0 else []) + ([EOS] if i == len(toks) - 1 else []),
}

TEMPLATE_NAMES = tuple(_TEMPLATES)
DEFAULT_TEMPLATES = TEMPLATE_NAMES


def check_templates(templates: Sequence[str]) -> tuple[str, ...]:
    unknown = [t for t in templates if t not in _TEMPLATES]
    if unknown:
        raise ValueError(f"unknown feature templates: {', '.join(unknown)}")
    return tuple(templates)


def extract_features(tokens: Sequence[str], pos: int, templates: Sequence[str] = DEFAULT_TEMPLATES) -> list[str]:
    """Feature strings for ``tokens[pos]``; sentence edges emit BOS/EOS sentinels."""
    if not 0 <= pos < len(tokens):
        raise IndexError(f"position {pos} out of range for {len(tokens)} tokens")
    seen: dict[str, None] = {}
    for name in templates:
        for feat in _TEMPLATES[name](tokens, pos):
            seen.setdefault(feat)
    return list(seen)
