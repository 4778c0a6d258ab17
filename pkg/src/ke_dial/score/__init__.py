"""Evaluation metrics for generated responses."""

from ke_dial.score.graph import graph_precision_2hop
from ke_dial.score.inform import Goal, inform_success
from ke_dial.score.metrics import babi_accuracy, bleu, entity_f1, format_babi
from ke_dial.score.report import ScoreInputs, ScoreReport, score_corpus

__all__ = [
    "Goal",
    "ScoreInputs",
    "ScoreReport",
    "babi_accuracy",
    "bleu",
    "entity_f1",
    "format_babi",
    "graph_precision_2hop",
    "inform_success",
    "score_corpus",
]
