"""Rule-based word and sentence tokenization for Bengali text."""

from __future__ import annotations

import unicodedata

DANDA = "।"
DOUBLE_DANDA = "॥"
ABBREVIATION_SIGN = "৽"

SPLIT_PUNCTUATION = frozenset(DANDA + DOUBLE_DANDA + ABBREVIATION_SIGN + ".,;:!?()[]{}\"'-")
SENTENCE_TERMINATORS = frozenset(DANDA + DOUBLE_DANDA + "?!.")

assert SENTENCE_TERMINATORS <= SPLIT_PUNCTUATION


def basic_tokenize(text: str) -> list[str]:
    """Split on whitespace and make every splitting punctuation mark its own token.

    >>> basic_tokenize("কত, টাকা?")
    ['কত', ',', 'টাকা', '?']
    """
    text = unicodedata.normalize("NFC", text)
    tokens: list[str] = []
    buf: list[str] = []
    for ch in text:
        if ch.isspace() or ch in SPLIT_PUNCTUATION:
            if buf:
                tokens.append("".join(buf))
                buf.clear()
            if not ch.isspace():
                tokens.append(ch)
        else:
            buf.append(ch)
    if buf:
        tokens.append("".join(buf))
    return tokens


def sentence_tokenize(text: str) -> list[str]:
    """Split text into sentences after each run of terminators.

    A run like ``"?!"`` or ``"।।"`` closes a single sentence and stays
    attached to it. Abbreviations are not protected: ``"ড. রহমান"``
    becomes two sentences.
    """
    text = unicodedata.normalize("NFC", text)
    sentences: list[str] = []
    start = 0
    i, n = 0, len(text)
    while i < n:
        if text[i] in SENTENCE_TERMINATORS:
            while i + 1 < n and text[i + 1] in SENTENCE_TERMINATORS:
                i += 1
            piece = text[start : i + 1].strip()
            if piece:
                sentences.append(piece)
            start = i + 1
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences
