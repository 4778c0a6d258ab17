"""
图用户目标查询解析器（CYPHER 子集）
==================================

语法：

    MATCH n1-[rel]->n2, n2-[rel]->n3 [WHERE Z > 0] RETURN n1, n3

- 槽位名形如 ``n<数字>``；关系名写在方括号内，可含空格
- 箭头支持 ``->`` 与 ``→``
- ``WHERE Z > 0``（或 ``Z_n > 0``）表示启用递减因子 Z 守卫
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from ke_dial.domain.errors import QuerySyntaxError


@dataclass(frozen=True)
class PatternEdge:
    src: str
    relation: str
    dst: str


@dataclass(frozen=True)
class GraphQuery:
    pattern: tuple[PatternEdge, ...]
    return_slots: tuple[str, ...]
    z_guarded: bool = False

    @property
    def slots(self) -> tuple[str, ...]:
        """Slots in order of first appearance in the pattern."""
        seen: dict[str, None] = {}
        for e in self.pattern:
            seen.setdefault(e.src)
            seen.setdefault(e.dst)
        return tuple(seen)

    @property
    def relations(self) -> frozenset[str]:
        return frozenset(e.relation for e in self.pattern)

    def guarded(self, on: bool = True) -> GraphQuery:
        return GraphQuery(self.pattern, self.return_slots, on)

    def to_text(self) -> str:
        edges = ", ".join(f"{e.src}-[{e.relation}]->{e.dst}" for e in self.pattern)
        where = " WHERE Z > 0" if self.z_guarded else ""
        return f"MATCH {edges}{where} RETURN {', '.join(self.return_slots)}"

    def __str__(self) -> str:
        return self.to_text()


def slot_number(slot: str) -> int:
    return int(slot[1:])


# =============================================================================
# 语法
# =============================================================================

GRAMMAR = r"""
start: "MATCH"i edge ("," edge)* z_guard? "RETURN"i SLOT ("," SLOT)*

edge: SLOT "-" "[" RELATION "]" ARROW SLOT
z_guard: "WHERE"i ZVAR ">" "0"

SLOT: /n[0-9]+/
RELATION: /[^\]\s][^\]]*/
ARROW: "->" | "→"
ZVAR: /Z(_n)?/i

%import common.WS
%ignore WS
"""

_PARSER = Lark(GRAMMAR, parser="lalr")


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _ToAst(Transformer):
    def edge(self, children):
        src, rel, _arrow, dst = children
        return PatternEdge(src.value, rel.value.strip(), dst.value)

    def z_guard(self, children):
        return True

    def start(self, children):
        edges = [c for c in children if isinstance(c, PatternEdge)]
        guarded = any(c is True for c in children)
        returns = [c for c in children if isinstance(c, Token) and c.type == "SLOT"]
        return edges, guarded, returns


def parse_graph_query(text: str) -> GraphQuery:
    """
    解析 CYPHER 子集查询

    Raises:
        QuerySyntaxError: 语法错误、RETURN 槽位不在模式中、模式不连通
    """
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as exc:
        pos = getattr(exc, "pos_in_stream", None)
        token = getattr(exc, "token", None)
        if (pos is None or pos < 0) and isinstance(token, Token) and token.start_pos is not None:
            pos = token.start_pos
        if pos is None or pos < 0:
            pos = len(text)
        raise QuerySyntaxError(f"syntax error in graph query {text!r}", _byte_offset(text, pos)) from None

    try:
        edges, guarded, returns = _ToAst().transform(tree)
    except VisitError as exc:
        raise exc.orig_exc from None

    query = GraphQuery(tuple(edges), tuple(t.value for t in returns), guarded)
    slots = set(query.slots)
    for tok in returns:
        if tok.value not in slots:
            raise QuerySyntaxError(
                f"return slot {tok.value!r} does not appear in the pattern",
                _byte_offset(text, tok.start_pos),
            )

    g = nx.Graph()
    g.add_nodes_from(slots)
    g.add_edges_from((e.src, e.dst) for e in edges)
    if not nx.is_connected(g):
        raise QuerySyntaxError("pattern is not connected", 0)
    return query
