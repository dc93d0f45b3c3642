"""
Tokens, sentences and corpus counts
===================================

``basic_tokenize`` splits on whitespace and cuts punctuation into separate
tokens. ``sentence_tokenize`` splits after danda, double danda, ``?``, ``!``
and ``.``.
"""

from bntk import basic_tokenize, corpus_stats, sentence_tokenize

text = "আমি ভাত খাই। তুমি কী খাও? সে ১২টা আম খেল!! ভালো॥"
print(basic_tokenize(text))

for sent in sentence_tokenize(text):
    print(repr(sent))

# a run of terminators closes a single sentence
print(sentence_tokenize("কী বলছ?! সত্যি।"))

# corpus statistics: one entry per document, bytes are decoded as UTF-8
docs = [text, "এক দুই তিন।", "বাংলা ভাষা".encode("utf-8")]
stats = corpus_stats(docs)
print(stats.documents, stats.sentences, stats.tokens)
