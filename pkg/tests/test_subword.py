import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bntk import subword
from bntk.subword import (
    META,
    SubwordTrainConfig,
    SubwordVocab,
    decode,
    em_step,
    encode,
    prepared,
    prune,
    seed_candidates,
    seed_vocab,
    train_unigram,
    viterbi_segment,
)


def vocab_of(probs):
    return SubwordVocab([(p, math.log(q)) for p, q in probs.items()])


# --- seeding -------------------------------------------------------------------------


def test_seed_contains_all_short_substrings():
    v = seed_vocab(["aa"], SubwordTrainConfig(vocab_size=10, max_piece_len=2))
    assert {"a", "aa", META, META + "a"} <= set(v.table)
    assert v.total_probability() == pytest.approx(1.0, abs=1e-12)


def test_seed_ranks_by_frequency_times_length():
    units = prepared(["abab"] * 100).units
    counts = seed_candidates(units, 4)
    # brute force over the raw strings
    assert counts["ab"] == sum(("▁abab"[i : i + 2] == "ab") for i in range(4)) * 100 == 200
    assert counts["ba"] == 100
    v = seed_vocab(["abab"] * 100, SubwordTrainConfig(vocab_size=4, max_piece_len=4))
    order = [p for p, _ in v.pieces]
    assert order.index("ab") < order.index("ba")


def test_seed_keeps_every_character_even_when_truncated():
    corpus = ["কখগঘ ঙচছ", "জঝ"]
    v = seed_vocab(corpus, SubwordTrainConfig(vocab_size=2, seed_size=3))
    assert set("কখগঘঙচছজঝ" + META) <= set(v.table)


def test_seed_rejects_empty_corpus():
    with pytest.raises(subword.TrainingError):
        seed_vocab(["", "  "], SubwordTrainConfig(vocab_size=5))


# --- EM ------------------------------------------------------------------------------


def test_em_step_matches_enumeration_on_two_char_word():
    units = subword._Units([("ab", 1)])
    v = vocab_of({"a": 1 / 3, "b": 1 / 3, "ab": 1 / 3})
    new, loglik = em_step(v, units)
    # segmentations: [ab] p=1/3, [a, b] p=1/9 -> posteriors 3/4 and 1/4
    assert loglik == pytest.approx(math.log(4 / 9), abs=1e-12)
    got = new.table
    assert math.exp(got["ab"]) == pytest.approx(0.75 / 1.25, abs=1e-12)
    assert math.exp(got["a"]) == pytest.approx(0.25 / 1.25, abs=1e-12)


def test_em_step_whole_word_piece_gets_mass():
    v = vocab_of({META: 0.2, "a": 0.2, "b": 0.2, META + "ab": 0.4})
    counts, _ = subword.expected_counts(v, ["ab ab"])
    assert counts[META + "ab"] >= 1.0


def test_expected_counts_match_brute_force(rng):
    for _ in range(20):
        alphabet = [META, "a", "b", "c"]
        extra = {"".join(rng.choice(alphabet[1:], size=rng.integers(2, 4))) for _ in range(4)}
        extra |= {META + "a", "ab"}
        probs = rng.dirichlet(np.ones(len(alphabet) + len(extra)))
        v = vocab_of(dict(zip(alphabet + sorted(extra), probs)))
        words = ["".join(rng.choice(["a", "b", "c"], size=rng.integers(1, 6))) for _ in range(5)]
        units = prepared([" ".join(words)]).units
        got, loglik = subword.expected_counts(v, subword._Units(units))
        want, want_ll = oracles.expected_piece_counts(units, v.table)
        assert loglik == pytest.approx(want_ll, abs=1e-9)
        for piece in want:
            assert got[piece] == pytest.approx(want[piece], abs=1e-9)


def test_em_raises_on_uncoverable_word():
    with pytest.raises(subword.EncodingError):
        em_step(vocab_of({META: 0.5, "a": 0.5}), ["ab"])


# --- pruning ---------------------------------------------------------------------------


def test_prune_noop_at_or_below_target():
    v = vocab_of({META: 0.25, "a": 0.25, "b": 0.25, "ab": 0.25})
    assert prune(v, ["ab"], SubwordTrainConfig(vocab_size=4)) is v


def _exact_loss(vocab, units, piece):
    """Corpus log-likelihood drop from deleting ``piece`` and renormalizing."""
    before = oracles.expected_piece_counts(units, vocab.table)[1]
    rest = {p: lp for p, lp in vocab.table.items() if p != piece}
    z = oracles.logsumexp(rest.values())
    after = oracles.expected_piece_counts(units, {p: lp - z for p, lp in rest.items()})[1]
    return before - after


def test_prune_drops_ba_before_ab():
    corpus = ["abab"] * 100
    units = prepared(corpus)
    v = vocab_of({META: 0.2, "a": 0.2, "b": 0.2, "ab": 0.2, "ba": 0.2})
    for _ in range(3):
        v, _ = em_step(v, units)
    assert _exact_loss(v, units.units, "ba") < _exact_loss(v, units.units, "ab")
    pruned = prune(v, units, SubwordTrainConfig(vocab_size=4))
    assert "ab" in pruned and "ba" not in pruned
    assert {META, "a", "b"} <= set(pruned.table)
    assert pruned.total_probability() == pytest.approx(1.0, abs=1e-9)


def test_prune_never_drops_single_characters(rng):
    corpus = ["".join(rng.choice(list("কখগঘ"), size=rng.integers(1, 7))) for _ in range(60)]
    v = seed_vocab(corpus, SubwordTrainConfig(vocab_size=8, max_piece_len=4))
    chars = {p for p, _ in v.pieces if len(p) == 1}
    pruned = prune(v, corpus, SubwordTrainConfig(vocab_size=8))
    assert chars <= set(pruned.table)
    assert len(pruned) < len(v)


# --- training ---------------------------------------------------------------------------


def test_train_without_pruning_keeps_candidates():
    corpus = ["আমি ভাত খাই", "তুমি ভাত খাও"]
    cfg = SubwordTrainConfig(vocab_size=10_000, max_piece_len=3)
    seeded = seed_vocab(corpus, cfg)
    v = train_unigram(corpus, cfg)
    assert set(v.table) == set(seeded.table)
    assert v.total_probability() == pytest.approx(1.0, abs=1e-6)


def test_train_hits_target_size(rng):
    words = ["".join(rng.choice(list("কখগঘঙচ"), size=rng.integers(2, 8))) for _ in range(80)]
    corpus = [" ".join(rng.choice(words, size=6)) for _ in range(100)]
    v = train_unigram(corpus, SubwordTrainConfig(vocab_size=40, max_piece_len=6))
    assert len(v) == 40
    assert v.total_probability() == pytest.approx(1.0, abs=1e-6)
    assert all(np.isfinite(lp) for _, lp in v.pieces)
    assert set("কখগঘঙচ" + META) <= set(v.table)


def test_train_abab_keeps_ab():
    v = train_unigram(["abab"] * 100, SubwordTrainConfig(vocab_size=4, max_piece_len=2))
    assert sorted(p for p, _ in v.pieces if len(p) > 1) == ["ab"]


def test_train_rejects_small_vocab():
    with pytest.raises(subword.ConfigError):
        train_unigram(["abc"], SubwordTrainConfig(vocab_size=3))


def test_config_validation():
    with pytest.raises(subword.ConfigError):
        SubwordTrainConfig(shrink_factor=1.0)
    assert SubwordTrainConfig(vocab_size=100).seed_size == 800


# --- encode / decode -------------------------------------------------------------------


def test_encode_examples():
    assert viterbi_segment(vocab_of({"a": 1.0}), "a")[0] == ["a"]
    assert viterbi_segment(vocab_of({"a": 0.4, "b": 0.4, "ab": 0.2}), "ab")[0] == ["ab"]
    assert viterbi_segment(vocab_of({"a": 0.5, "b": 0.32, "ab": 0.15}), "ab")[0] == ["a", "b"]


def test_encode_exact_tie_prefers_fewer_pieces():
    v = vocab_of({"a": 0.5, "b": 0.3, "ab": 0.15, "c": 0.05})
    best, _ = oracles.best_segmentation("ab", v.table)
    assert best == ["ab"]
    assert viterbi_segment(v, "ab")[0] == ["ab"]


def test_encode_tie_prefers_leftmost_longest():
    # "abc" as ab|c or a|bc: same score and piece count
    v = vocab_of({"a": 0.1, "b": 0.1, "c": 0.1, "ab": 0.35, "bc": 0.35})
    assert viterbi_segment(v, "abc")[0] == ["ab", "c"]


def test_encode_adds_meta_prefix_and_unk():
    v = vocab_of({META: 0.3, "ক": 0.3, META + "ক": 0.4})
    assert encode(v, "  ক  কক ") == [META + "ক", META + "ক", "ক"]
    assert encode(v, "কx") == [META + "ক", subword.UNK]
    assert subword.encode_ids(v, "কx")[-1] == v.unk_id == 3


def test_decode_examples():
    assert decode([]) == ""
    assert decode(["▁আমি", "▁ভাত"]) == "আমি ভাত"


@pytest.fixture(scope="module")
def trained():
    rng = np.random.default_rng(3)
    words = ["".join(rng.choice(list("আমিভাতখাই"), size=rng.integers(1, 6))) for _ in range(50)]
    corpus = [" ".join(rng.choice(words, size=5)) for _ in range(80)]
    return train_unigram(corpus, SubwordTrainConfig(vocab_size=30, max_piece_len=5))


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="আমিভাতখাই \t", max_size=30))
def test_round_trip(trained, text):
    assert decode(encode(trained, text)) == " ".join(text.split())


def test_save_load_round_trip(trained, tmp_path):
    path = tmp_path / "v.model"
    trained.save(path)
    loaded = SubwordVocab.load(path)
    assert loaded.pieces == trained.pieces
    again = tmp_path / "v2.model"
    loaded.save(again)
    assert path.read_bytes() == again.read_bytes()
    assert path.read_text(encoding="utf-8").startswith(f"#unigram v1 vocab_size={len(trained)}\n")


def test_load_rejects_bad_file(tmp_path):
    path = tmp_path / "bad"
    path.write_text("#unigram v1 vocab_size=2\na\t-0.1\n", encoding="utf-8")
    with pytest.raises(ValueError):
        SubwordVocab.load(path)


def test_em_step_survives_tiny_counts():
    # "▁" gets an expected count near 4e-322; divided by the ~1e4 total it
    # underflows to zero, while the log-space difference stays finite
    v = SubwordVocab([(META + "a", 0.0), (META + "b", 0.0), (META, -740.0), ("a", 0.0)])
    new, _ = em_step(v, ["a"] + ["b"] * 10_000)
    assert -math.inf < new.table[META] < -740


def test_train_revives_characters_em_zeroed():
    # every word is first covered by one whole-word piece, so EM zeroes the
    # characters; pruning must not leave words without any segmentation
    rng = np.random.default_rng(1111)
    words = [s + e for s in ["কর", "বল", "খেল", "পড়"] for e in ["", "ি", "েছি", "ছে", "লাম"]]
    corpus = [" ".join(rng.choice(words, size=4)) for _ in range(100)]
    vocab = train_unigram(corpus, SubwordTrainConfig(vocab_size=25, max_piece_len=6))
    assert all(lp > -math.inf for _, lp in vocab.pieces)
    for line in corpus:
        assert subword.UNK not in encode(vocab, line)
