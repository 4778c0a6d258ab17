"""CYPHER-subset user goal queries over graph KBs, Z ledger and query induction."""

from ke_dial.gquery.induce import InducedQuery, derive_query_from_dialogue, mentioned_nodes
from ke_dial.gquery.ledger import ZLedger, consume_binding
from ke_dial.gquery.matcher import SlotBinding, match_pattern
from ke_dial.gquery.parser import GraphQuery, PatternEdge, parse_graph_query, slot_number

__all__ = [
    "GraphQuery",
    "InducedQuery",
    "PatternEdge",
    "SlotBinding",
    "ZLedger",
    "consume_binding",
    "derive_query_from_dialogue",
    "match_pattern",
    "mentioned_nodes",
    "parse_graph_query",
    "slot_number",
]
