"""Precision of predicted graph entities against the 2-hop neighbourhood of user entities."""

from __future__ import annotations

from collections.abc import Sequence

from ke_dial.domain.errors import AlignmentError
from ke_dial.domain.graph import GraphKB, neighbors_h
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.score.metrics import entity_set


def gold_entities(user_text: str, g: GraphKB, lexicon: EntityLexicon, hops: int = 2) -> set[str]:
    gold: set[str] = set()
    for n in entity_set(user_text, lexicon):
        if n not in g.nodes:
            continue
        gold.add(n)
        gold |= neighbors_h(g, n, g.relations, hops) if g.relations else set()
    return gold


def graph_precision_2hop(
    pred: Sequence[str],
    user_turns: Sequence[str],
    g: GraphKB,
    lexicon: EntityLexicon,
    train_entities: set[str],
    hops: int = 2,
) -> tuple[float, float]:
    """
    Returns (precision, OOV precision), both micro-averaged over turns.

    The gold set of a turn includes the user entities themselves.
    """
    if len(pred) != len(user_turns):
        raise AlignmentError(f"{len(pred)} responses vs {len(user_turns)} user turns")
    correct = total = oov_correct = oov_total = 0
    for response, user_text in zip(pred, user_turns):
        gold = gold_entities(user_text, g, lexicon, hops)
        for e in entity_set(response, lexicon):
            hit = e in g.nodes and e in gold
            total += 1
            correct += hit
            if e not in train_entities:
                oov_total += 1
                oov_correct += hit
    precision = correct / total if total else 0.0
    oov_precision = oov_correct / oov_total if oov_total else 0.0
    return precision, oov_precision
