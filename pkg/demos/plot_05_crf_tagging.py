"""
CRF part-of-speech tagging
==========================

A toy tagged corpus, a 75/25 split, L-BFGS training and token-level scores.
For NER the same code applies with ``scheme="token-nonO"``.
"""

import numpy as np

from bntk.crf import LabeledSequence, evaluate, split_train_test, tag, train_crf

rng = np.random.default_rng(1)
nouns = ["ছেলেটি", "মেয়েটি", "বই", "ভাত", "স্কুল"]
verbs = ["পড়ে", "খায়", "যায়", "লেখে"]
adjs = ["ভালো", "নতুন", "বড়"]


def sentence():
    toks, tags = [], []
    for words, label in ((nouns, "NN"), (adjs, "JJ"), (nouns, "NN"), (verbs, "VB")):
        toks.append(str(rng.choice(words)))
        tags.append(label)
    return LabeledSequence(toks + ["।"], tags + ["PUNCT"])


data = [sentence() for _ in range(200)]
train, test = split_train_test(data, 0.75, seed=0)
print(len(train), "train /", len(test), "test")

model = train_crf(train)
print("loss", [round(x, 2) for x in model.loss_history[:5]], "...", round(model.loss_history[-1], 3))

report = evaluate(model, test, "token-all")
print("P R F1:", report.line())

# "আম" was never seen; context and suffix features still place it
print(tag(model, ["মেয়েটি", "নতুন", "আম", "খায়", "।"]))
