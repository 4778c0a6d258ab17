"""Deterministic prefix-trie response generator used to check KB coverage of a corpus."""

from ke_dial.memlm.store import load_model, save_model
from ke_dial.memlm.trie import (
    EMPTY_GENERATION,
    MemLMEvaluation,
    PrefixTrie,
    evaluate,
    flatten_history,
    generate,
    respond,
    train,
)

__all__ = [
    "EMPTY_GENERATION",
    "MemLMEvaluation",
    "PrefixTrie",
    "evaluate",
    "flatten_history",
    "generate",
    "load_model",
    "respond",
    "save_model",
    "train",
]
