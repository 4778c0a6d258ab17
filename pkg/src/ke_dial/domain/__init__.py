"""Core data model: dialogues, table KBs, graph KBs and entity lexicons."""

from ke_dial.domain.dialogue import Dialogue, Speaker, Turn, normalize_text, strip_api_turns, tokenize
from ke_dial.domain.graph import GraphKB, neighbors, neighbors_h
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.domain.table import TableKB

__all__ = [
    "Dialogue",
    "EntityLexicon",
    "GraphKB",
    "Speaker",
    "TableKB",
    "Turn",
    "neighbors",
    "neighbors_h",
    "normalize_text",
    "strip_api_turns",
    "tokenize",
]
