"""
Skip-gram embeddings
====================

Two groups of words never share a context. After a few epochs the members of
each group end up closer to each other than to the other group.
"""

import itertools

import numpy as np

from bntk.embed import EmbedTrainConfig, cosine_similarity, most_similar, train_skipgram, word_vector

rng = np.random.default_rng(7)
fruit = ["আম", "জাম", "কলা", "লিচু", "আপেল", "কমলা", "পেঁপে", "আনারস"]
tools = ["হাতুড়ি", "করাত", "পেরেক", "বাটালি", "কোদাল", "শাবল", "রেঞ্চ", "স্ক্রু"]
fruit_ctx = ["মিষ্টি", "পাকা", "গাছে", "রসালো", "টক", "বাজারে", "খোসা", "বীজ"]
tool_ctx = ["লোহার", "ধারালো", "কাঠে", "ভারী", "মরিচা", "হাতল", "মিস্ত্রি", "বাক্সে"]

corpus = []
for n in range(300):
    words, ctx = (fruit, fruit_ctx) if n % 2 == 0 else (tools, tool_ctx)
    corpus.append(" ".join(rng.choice(words) if j % 2 == 0 else rng.choice(ctx) for j in range(10)))

model = train_skipgram(corpus, EmbedTrainConfig(dim=20, epochs=5, seed=7))


def mean_cos(pairs):
    return np.mean([cosine_similarity(word_vector(model, a), word_vector(model, b)) for a, b in pairs])


within = mean_cos(list(itertools.combinations(fruit, 2)) + list(itertools.combinations(tools, 2)))
across = mean_cos(list(itertools.product(fruit, tools)))
print(f"within {within:.3f}  across {across:.3f}")
print(most_similar(model, "আম", 3))

# subword mode composes vectors from character n-grams, so unseen words get one too
sub = train_skipgram(corpus, EmbedTrainConfig(dim=20, epochs=5, seed=7, mode="subword", buckets=4096))
print(word_vector(sub, "আমগাছ")[:4])
