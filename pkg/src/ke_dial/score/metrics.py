"""
回复级评测指标
==============

- entity_f1：逐轮抽取实体集合，TP/FP/FN 全局累加后计算 micro P/R/F1
- bleu：语料级 BLEU-4，按阶累加 nltk 的 modified_precision，零分子用 ε=1e-9 平滑
- babi_accuracy：回复准确率与对话准确率（全部回复正确的对话比例）
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from nltk.translate.bleu_score import brevity_penalty, closest_ref_length, modified_precision

from ke_dial.domain.dialogue import normalize_text
from ke_dial.domain.errors import AlignmentError, EmptyCorpus
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.ke.matcher import match_entities

BLEU_EPSILON = 1e-9
MAX_ORDER = 4


def entity_set(text: str, lexicon: EntityLexicon) -> set[str]:
    return {m.key for m in match_entities(text, lexicon)}


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def entity_f1(
    pred: Sequence[str], gold: Sequence[str], lexicon: EntityLexicon
) -> tuple[float, float, float]:
    """
    Micro-averaged entity precision, recall and F1.

    Raises:
        AlignmentError: pred and gold differ in length
    """
    if len(pred) != len(gold):
        raise AlignmentError(f"{len(pred)} predicted vs {len(gold)} gold responses")
    tp = fp = fn = 0
    for p, g in zip(pred, gold):
        p_set, g_set = entity_set(p, lexicon), entity_set(g, lexicon)
        tp += len(p_set & g_set)
        fp += len(p_set - g_set)
        fn += len(g_set - p_set)
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def bleu(pred: Sequence[str], refs: Sequence[str]) -> float:
    """
    语料级 BLEU，返回 [0, 1]

    第 n 阶只统计长度 >= n 的预测（分子分母都跳过），阶数取实际有计数的各阶，均匀权重。
    ε 只加在零分子上，长度惩罚用 nltk 的 brevity_penalty。
    """
    if not pred:
        raise EmptyCorpus("BLEU over an empty corpus")
    if len(pred) != len(refs):
        raise AlignmentError(f"{len(pred)} predicted vs {len(refs)} reference responses")
    numerators = [0] * (MAX_ORDER + 1)
    denominators = [0] * (MAX_ORDER + 1)
    hyp_len = ref_len = 0
    for p, r in zip(pred, refs):
        hyp, ref = p.split(), [r.split()]
        hyp_len += len(hyp)
        ref_len += closest_ref_length(ref, len(hyp))
        for n in range(1, min(MAX_ORDER, len(hyp)) + 1):
            precision = modified_precision(ref, hyp, n)
            numerators[n] += precision.numerator
            denominators[n] += precision.denominator

    orders = [n for n in range(1, MAX_ORDER + 1) if denominators[n] > 0]
    if not orders or numerators[1] == 0:
        return 0.0
    log_precision = sum(
        math.log((numerators[n] or BLEU_EPSILON) / denominators[n]) for n in orders
    ) / len(orders)
    score = brevity_penalty(ref_len, hyp_len) * math.exp(log_precision)
    return float(min(1.0, max(0.0, score)))


def babi_accuracy(
    pred: Sequence[str], gold: Sequence[str], boundaries: Sequence[int]
) -> tuple[float, float]:
    """
    bAbI 风格的回复准确率和对话准确率

    Args:
        pred: 预测回复
        gold: 标准回复
        boundaries: 每段对话的回复数，总和必须等于回复数
    """
    if len(pred) != len(gold):
        raise AlignmentError(f"{len(pred)} predicted vs {len(gold)} gold responses")
    if sum(boundaries) != len(gold) or any(b < 0 for b in boundaries):
        raise AlignmentError(f"dialogue boundaries sum to {sum(boundaries)}, expected {len(gold)}")
    if not gold:
        raise EmptyCorpus("accuracy over an empty corpus")

    correct = [normalize_text(p) == normalize_text(g) for p, g in zip(pred, gold)]
    dialogues_ok = 0
    start = 0
    for size in boundaries:
        if all(correct[start : start + size]):
            dialogues_ok += 1
        start += size
    return sum(correct) / len(correct), _ratio(dialogues_ok, len(boundaries))


def format_babi(response_acc: float, dialogue_acc: float) -> str:
    """'99.99 (99.90)' style: response (dialogue) percentages."""
    return f"{response_acc * 100:.2f} ({dialogue_acc * 100:.2f})"
