import io

import pytest

from bntk.cli import run
from bntk.crf import LabeledSequence, write_tsv


def call(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def pos_tsv(tmp_path):
    words = {"আমি": "PRP", "তুমি": "PRP", "ভাত": "NN", "মাছ": "NN", "খাই": "VB", "খাও": "VB", "।": "PUNCT"}
    data = [
        LabeledSequence(s.split(), [words[w] for w in s.split()])
        for s in ["আমি ভাত খাই ।", "তুমি মাছ খাও ।", "আমি মাছ খাই ।", "তুমি ভাত খাও ।"] * 3
    ]
    path = tmp_path / "pos.tsv"
    write_tsv(data, path)
    return path


def test_tokenize_basic():
    assert call("tokenize", "--method", "basic", stdin="আমি ভাত খাই।\n") == (0, "আমি ভাত খাই ।\n", "")


def test_tokenize_sentence_and_text_flag():
    code, out, _ = call("tokenize", "--method", "sentence", "--text", "আমি ভাত খাই। তুমি যাও।")
    assert code == 0 and out == "আমি ভাত খাই।\nতুমি যাও।\n"


def test_subword_train_and_tokenize(tmp_path):
    corpus = tmp_path / "c.txt"
    corpus.write_text("আমি ভাত খাই\nতুমি ভাত খাও\n" * 5, encoding="utf-8")
    model = tmp_path / "sp.model"
    code, out, _ = call("subword-train", "--input", str(corpus), "--vocab-size", "20", "--out", str(model))
    assert code == 0 and out == ""
    code, out, _ = call("tokenize", "--method", "subword", "--model", str(model), stdin="আমি ভাত\n")
    assert code == 0
    assert out.strip().replace(" ", "").replace("▁", " ").strip() == "আমি ভাত"


def test_embed_train_and_query(tmp_path):
    corpus = tmp_path / "c.txt"
    corpus.write_text("আমি ভাত খাই\nতুমি ভাত খাও\n" * 5, encoding="utf-8")
    model = tmp_path / "e.bin"
    code, _, _ = call("embed-train", "--input", str(corpus), "--out", str(model), "--dim", "8", "--epochs", "1")
    assert code == 0
    code, out, _ = call("embed-query", "--model", str(model), "--word", "ভাত", "--topk", "2")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2
    assert all(len(line.split("\t")) == 2 for line in lines)
    assert call("embed-query", "--model", str(model), "--word", "পাখি")[0] == 2


def test_crf_train_tag_eval(tmp_path, pos_tsv):
    model = tmp_path / "pos.crf"
    code, out, _ = call("crf-train", "--task", "pos", "--train", str(pos_tsv), "--out", str(model))
    assert code == 0 and out == ""
    code, out, _ = call("crf-tag", "--model", str(model), "--text", "আমি ভাত খাই।")
    assert (code, out) == (0, "আমি/PRP ভাত/NN খাই/VB ।/PUNCT\n")
    assert call("crf-eval", "--model", str(model), "--test", str(pos_tsv), "--scheme", "token-all") == (
        0,
        "100.00\t100.00\t100.00\n",
        "",
    )


def test_crf_tag_escapes_slash(tmp_path):
    path = tmp_path / "d.tsv"
    write_tsv([LabeledSequence(["১/২"], ["NUM"])], path)
    model = tmp_path / "m.crf"
    assert call("crf-train", "--train", str(path), "--out", str(model))[0] == 0
    assert call("crf-tag", "--model", str(model), "--stdin", stdin="১/২\n")[1] == "১\\/২/NUM\n"


def test_crf_train_split_is_byte_deterministic(tmp_path, pos_tsv):
    outs = []
    for name in ("a.crf", "b.crf"):
        path = tmp_path / name
        code, out, _ = call("crf-train", "--train", str(pos_tsv), "--split", "0.75", "--seed", "7", "--out", str(path))
        assert code == 0 and len(out.split("\t")) == 3
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_stats(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("আমি ভাত খাই। তুমি যাও।\nভালো\n", encoding="utf-8")
    assert call("stats", "--input", str(path)) == (0, "2\t3\t8\n", "")


def test_config_file_precedence(tmp_path):
    corpus = tmp_path / "c.txt"
    corpus.write_text("আমি ভাত খাই\nতুমি ভাত খাও\n" * 3, encoding="utf-8")
    cfg = tmp_path / "embed.cfg"
    cfg.write_text(f"# settings\ninput = {corpus}\ndim = 6\nepochs = 1\n", encoding="utf-8")
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    assert call("embed-train", "--config", str(cfg), "--out", str(a))[0] == 0
    assert a.read_bytes().startswith(b"#embed v1 mode=word dim=6 ")
    assert call("embed-train", "--config", str(cfg), "--out", str(b), "--dim", "4")[0] == 0
    assert b.read_bytes().startswith(b"#embed v1 mode=word dim=4 ")


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n", encoding="utf-8")
    code, out, err = call("stats", "--config", str(cfg), "--input", "x")
    assert code == 1 and out == "" and "colour" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["tokenize", "--method", "magic"],
        ["stats"],
        ["crf-eval", "--model", "m"],
    ],
)
def test_usage_errors(argv):
    code, out, err = call(*argv)
    assert code == 1 and out == "" and err


def test_data_errors(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tb\tc\n", encoding="utf-8")
    code, out, err = call("crf-train", "--train", str(bad), "--out", str(tmp_path / "m"))
    assert code == 2 and out == "" and "bad.tsv:1" in err
    code, out, _ = call("crf-tag", "--model", str(tmp_path / "missing.crf"), "--text", "ক")
    assert code == 2 and out == ""
    code, out, _ = call("tokenize", "--method", "subword", "--model", str(tmp_path / "none"), "--text", "ক")
    assert code == 2 and out == ""
