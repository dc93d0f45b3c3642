"""
Lexicons and token filters
==========================

The package ships three word lists: stopwords, letters and punctuation.
They load by kind and behave like sets of NFC-normalized strings.
"""

from bntk import LexiconKind, basic_tokenize, load_lexicon, remove_foreign_words, remove_punctuation, remove_stopwords

stop = load_lexicon(LexiconKind.STOPWORDS)
punct = load_lexicon(LexiconKind.PUNCTUATION)
letters = load_lexicon(LexiconKind.LETTERS)
print(len(stop), "stopwords,", len(punct), "punctuation marks,", len(letters), "letters")
print("এবং" in stop, "।" in punct)

# tokenize a sentence with Latin script mixed in
tokens = basic_tokenize("আমি এবং আমার বন্ধু Python শিখছি।")
print(tokens)

# each filter takes a token list and returns a new one
tokens = remove_punctuation(tokens, punct)
tokens = remove_stopwords(tokens, stop)
print(tokens)
print(remove_foreign_words(tokens))

# passing the wrong kind of lexicon is an error, not a silent no-op
try:
    remove_stopwords(tokens, punct)
except ValueError as exc:
    print("error:", exc)
