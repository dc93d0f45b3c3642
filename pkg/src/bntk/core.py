"""Bengali text primitives: lexicons, token filters and corpus statistics."""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

from .tokenize import basic_tokenize, sentence_tokenize

BENGALI_BLOCK = (0x0980, 0x09FF)
BENGALI_DIGITS = (0x09E6, 0x09EF)


class LexiconLoadError(RuntimeError):
    """A lexicon data file is missing or unreadable."""


class CorpusDecodeError(ValueError):
    """Raised when corpus bytes are not valid UTF-8."""

    def __init__(self, offset: int, reason: str):
        super().__init__(f"undecodable bytes at offset {offset}: {reason}")
        self.offset = offset


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def in_bengali_block(ch: str) -> bool:
    return BENGALI_BLOCK[0] <= ord(ch) <= BENGALI_BLOCK[1]


class LexiconKind(str, enum.Enum):
    STOPWORDS = "stopwords"
    LETTERS = "letters"
    PUNCTUATION = "punctuation"


@dataclass(frozen=True)
class Lexicon:
    """A named, ordered set of NFC-normalized Bengali strings.

    Membership tests normalize the query first, so composed and decomposed
    spellings of the same word match the same entry.
    """

    kind: LexiconKind
    entries: tuple[str, ...]
    _lookup: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seen: dict[str, None] = {}
        for entry in self.entries:
            entry = nfc(entry)
            if entry:
                seen.setdefault(entry)
        object.__setattr__(self, "kind", LexiconKind(self.kind))
        object.__setattr__(self, "entries", tuple(seen))
        object.__setattr__(self, "_lookup", frozenset(seen))

    def __contains__(self, item: object) -> bool:
        return isinstance(item, str) and nfc(item) in self._lookup

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def characters(self) -> frozenset[str]:
        """Every code point used by any entry."""
        return frozenset("".join(self.entries))


def parse_lexicon_lines(lines: Iterable[str]) -> list[str]:
    """Entries from lexicon file lines.

    Lines starting with ``#`` are comments, except a line holding a lone
    ``#``, which is the literal hash mark. Blank lines are skipped.
    """
    entries = []
    for line in lines:
        line = line.rstrip("\r\n")
        if line.startswith("#") and line != "#":
            continue
        line = line.strip() if line != "#" else line
        if line:
            entries.append(line)
    return entries


def load_lexicon(kind: Union[LexiconKind, str], path: Union[str, Path, None] = None) -> Lexicon:
    """Load one of the bundled lexicons (or a user file with the same format)."""
    kind = LexiconKind(kind)
    if path is None:
        source = resources.files("bntk") / "data" / f"{kind.value}.txt"
        name = f"data/{kind.value}.txt"
    else:
        source = Path(path)
        name = str(path)
    try:
        text = source.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise LexiconLoadError(f"lexicon file not found: {name}") from exc
    except (OSError, UnicodeDecodeError) as exc:
        raise LexiconLoadError(f"cannot read lexicon file {name}: {exc}") from exc
    entries = parse_lexicon_lines(text.splitlines())
    if not entries:
        raise LexiconLoadError(f"lexicon file {name} has no entries")
    return Lexicon(kind, tuple(entries))


def _require_kind(lex: Lexicon, kind: LexiconKind) -> None:
    if lex.kind is not kind:
        raise ValueError(f"expected a {kind.value} lexicon, got {lex.kind.value}")


def remove_stopwords(tokens: Sequence[str], lex: Lexicon) -> list[str]:
    _require_kind(lex, LexiconKind.STOPWORDS)
    return [tok for tok in tokens if tok not in lex]


def remove_punctuation(tokens: Sequence[str], lex: Lexicon) -> list[str]:
    """Drop tokens made only of punctuation characters; mixed tokens stay."""
    _require_kind(lex, LexiconKind.PUNCTUATION)
    marks = lex.characters
    return [tok for tok in tokens if not (tok and all(ch in marks for ch in nfc(tok)))]


def is_foreign(token: str) -> bool:
    return any(ch.isalpha() and not in_bengali_block(ch) for ch in token)


def remove_foreign_words(tokens: Sequence[str]) -> list[str]:
    """Keep tokens whose alphabetic characters all lie in the Bengali block.

    Digits and punctuation are not alphabetic, so ``"১২৩।"`` or ``"2020"``
    survive while ``"ভাতhello"`` does not.
    """
    return [tok for tok in tokens if not is_foreign(tok)]


@dataclass(frozen=True)
class CorpusStats:
    documents: int = 0
    sentences: int = 0
    tokens: int = 0

    def __add__(self, other: "CorpusStats") -> "CorpusStats":
        return CorpusStats(
            self.documents + other.documents,
            self.sentences + other.sentences,
            self.tokens + other.tokens,
        )


def _decode(doc: Union[str, bytes], base_offset: int) -> str:
    if isinstance(doc, str):
        return doc
    try:
        return doc.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusDecodeError(base_offset + exc.start, exc.reason) from exc


def _count(text: str) -> tuple[int, int]:
    sentences = sentence_tokenize(text)
    return len(sentences), sum(len(basic_tokenize(s)) for s in sentences)


def corpus_stats(corpus: Iterable[Union[str, bytes]]) -> CorpusStats:
    """Count documents, sentences and tokens.

    Documents may be ``str`` or UTF-8 ``bytes``; for bytes, the offset in a
    decode error is measured from the start of the stream.
    """
    docs = sents = toks = 0
    offset = 0
    for doc in corpus:
        text = _decode(doc, offset)
        if isinstance(doc, bytes):
            offset += len(doc)
        n_sent, n_tok = _count(text)
        docs, sents, toks = docs + 1, sents + n_sent, toks + n_tok
    return CorpusStats(docs, sents, toks)


def file_stats(path: Union[str, Path]) -> CorpusStats:
    """Corpus statistics for a file holding one document per non-blank line."""
    docs = sents = toks = 0
    offset = 0
    with open(path, "rb") as fh:
        for raw in fh:
            start, offset = offset, offset + len(raw)
            if not raw.strip():
                continue
            n_sent, n_tok = _count(_decode(raw, start))
            docs, sents, toks = docs + 1, sents + n_sent, toks + n_tok
    return CorpusStats(docs, sents, toks)
