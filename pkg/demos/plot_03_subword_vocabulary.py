"""
Training a unigram subword vocabulary
=====================================

We train on a small synthetic corpus of verb forms built from a handful of
stems and endings, then look at how words are split.
"""

import numpy as np

from bntk.subword import SubwordTrainConfig, SubwordVocab, decode, encode, train_unigram

rng = np.random.default_rng(0)
stems = ["কর", "বল", "খেল", "পড়", "লিখ", "দেখ"]
endings = ["", "ি", "েছি", "বে", "লাম", "ছে"]
words = [s + e for s in stems for e in endings]
corpus = [" ".join(rng.choice(words, size=6)) for _ in range(400)]

vocab = train_unigram(corpus, SubwordTrainConfig(vocab_size=40, max_piece_len=6))
print(len(vocab), "pieces; total probability", round(vocab.total_probability(), 6))

# the most probable pieces are whole frequent words and shared endings
for piece, logp in vocab.pieces[:10]:
    print(f"{piece}\t{logp:.3f}")

# unseen combinations fall back to known stems and endings
pieces = encode(vocab, "খেলবে দেখলাম")
print(pieces)
print(decode(pieces))

# characters never seen in training become <unk>
print(encode(vocab, "কর x"))

# the model file is plain text
vocab.save("/tmp/demo.subword")
print(SubwordVocab.load("/tmp/demo.subword").pieces == vocab.pieces)
