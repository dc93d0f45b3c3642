"""Bengali text processing: tokenization, subword vocabularies, embeddings and CRF tagging."""

from .core import (
    CorpusStats,
    Lexicon,
    LexiconKind,
    corpus_stats,
    load_lexicon,
    remove_foreign_words,
    remove_punctuation,
    remove_stopwords,
)
from .tokenize import basic_tokenize, sentence_tokenize

__version__ = "0.1.0"

__all__ = [
    "CorpusStats",
    "Lexicon",
    "LexiconKind",
    "basic_tokenize",
    "corpus_stats",
    "load_lexicon",
    "remove_foreign_words",
    "remove_punctuation",
    "remove_stopwords",
    "sentence_tokenize",
]
