"""Linear-chain CRF tagger for POS and NER."""

from .data import LabeledSequence, TsvParseError, load_tsv, split_train_test, write_tsv
from .evaluate import EvalReport, LabelScore, evaluate, score
from .features import DEFAULT_TEMPLATES, extract_features
from .model import CrfModel, log_partition, marginals, sequence_score, viterbi
from .train import CrfTrainConfig, DivergenceError, nll_and_gradient, tag, train_crf

__all__ = [
    "CrfModel",
    "CrfTrainConfig",
    "DEFAULT_TEMPLATES",
    "DivergenceError",
    "EvalReport",
    "LabelScore",
    "LabeledSequence",
    "TsvParseError",
    "evaluate",
    "extract_features",
    "load_tsv",
    "log_partition",
    "marginals",
    "nll_and_gradient",
    "score",
    "sequence_score",
    "split_train_test",
    "tag",
    "train_crf",
    "viterbi",
    "write_tsv",
]
