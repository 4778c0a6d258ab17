"""
表格用户目标查询解析器（SQL 子集）
=================================

语法：

    SELECT R FROM K [WHERE a OP v (AND a OP v)*] [GROUP BY a] [HAVING a = AGG(a)]

- 关键字大小写不敏感；属性名和取值可用单引号包裹以包含空格（'' 转义单引号）
- OP ∈ {=, ==, !=, <>, <, >, <=, >=}
- AGG ∈ {MIN, MAX, SUM, AVG}

使用示例：
---------
>>> q = parse_table_query("SELECT name FROM restaurant WHERE area = east")
>>> q.where[0].op
<Op.EQ: '='>
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from ke_dial.domain.errors import QuerySyntaxError
from ke_dial.tquery.aggregate import AGGREGATES


class Op(str, Enum):
    EQ = "="
    NEQ = "!="
    LT = "<"
    GT = ">"
    LEQ = "<="
    GEQ = ">="

    @property
    def numeric(self) -> bool:
        return self not in (Op.EQ, Op.NEQ)


_OP_SPELLINGS = {
    "=": Op.EQ,
    "==": Op.EQ,
    "!=": Op.NEQ,
    "<>": Op.NEQ,
    "<": Op.LT,
    ">": Op.GT,
    "<=": Op.LEQ,
    ">=": Op.GEQ,
}

KEYWORDS = ("select", "from", "where", "group", "by", "having", "and")


@dataclass(frozen=True)
class Constraint:
    attribute: str
    op: Op
    value: str


@dataclass(frozen=True)
class Having:
    attribute: str
    aggregate: str
    comparator: Op = Op.EQ


@dataclass(frozen=True)
class TableQuery:
    """
    解析后的表格查询

    ``select == ("*",)`` 表示选择全部属性。
    """

    select: tuple[str, ...]
    table: str
    where: tuple[Constraint, ...] = ()
    group_by: str | None = None
    having: Having | None = None
    _text: str | None = field(default=None, compare=False, repr=False)

    @property
    def select_all(self) -> bool:
        return self.select == ("*",)

    @property
    def effective_select(self) -> tuple[str, ...]:
        """R extended with WHERE and HAVING attributes, first-appearance order."""
        out = list(self.select)
        extra = [c.attribute for c in self.where]
        if self.having is not None:
            extra.append(self.having.attribute)
        for a in extra:
            if a not in out:
                out.append(a)
        return tuple(out)

    def to_text(self) -> str:
        parts = [f"SELECT {', '.join(quote(a) if a != '*' else a for a in self.select)}"]
        parts.append(f"FROM {quote(self.table)}")
        if self.where:
            conds = " AND ".join(
                f"{quote(c.attribute)} {c.op.value} {quote(c.value)}" for c in self.where
            )
            parts.append(f"WHERE {conds}")
        if self.group_by is not None:
            parts.append(f"GROUP BY {quote(self.group_by)}")
        if self.having is not None:
            h = self.having
            parts.append(
                f"HAVING {quote(h.attribute)} {h.comparator.value} {h.aggregate}({quote(h.attribute)})"
            )
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_text()


_BARE = re.compile(r"[^\s,()'=<>!*]+")


def quote(word: str) -> str:
    if _BARE.fullmatch(word) and word.lower() not in KEYWORDS:
        return word
    return "'" + word.replace("'", "''") + "'"


# =============================================================================
# 语法
# =============================================================================

GRAMMAR = r"""
start: "SELECT"i select_list "FROM"i ident where_clause? group_clause? having_clause?

select_list: STAR                -> select_all
           | ident ("," ident)*  -> select_attrs

where_clause: "WHERE"i constraint ("AND"i constraint)*
constraint: ident COMPARATOR ident
group_clause: "GROUP"i "BY"i ident
having_clause: "HAVING"i ident COMPARATOR FUNC "(" ident ")"

ident: WORD | QUOTED

STAR: "*"
COMPARATOR: "<=" | ">=" | "!=" | "<>" | "==" | "=" | "<" | ">"
FUNC.2: /[A-Za-z_]+(?=\s*\()/
WORD: /(?!(?:select|from|where|group|by|having|and)\b)[^\s,()'=<>!*]+/i
QUOTED: /'(?:[^']|'')*'/

%import common.WS
%ignore WS
"""

_PARSER = Lark(GRAMMAR, parser="lalr")


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _ToAst(Transformer):
    def __init__(self, text: str):
        super().__init__()
        self._text = text

    def ident(self, children):
        (tok,) = children
        if tok.type == "QUOTED":
            return tok.value[1:-1].replace("''", "'")
        return tok.value

    def select_all(self, children):
        return ("*",)

    def select_attrs(self, children):
        return tuple(children)

    def constraint(self, children):
        attribute, op, value = children
        return Constraint(attribute, _OP_SPELLINGS[op.value], value)

    def where_clause(self, children):
        return ("where", tuple(children))

    def group_clause(self, children):
        return ("group_by", children[0])

    def having_clause(self, children):
        attribute, op, func, inner = children
        name = func.value.upper()
        if name not in AGGREGATES:
            raise QuerySyntaxError(
                f"unknown aggregate {func.value!r}", _byte_offset(self._text, func.start_pos)
            )
        if _OP_SPELLINGS[op.value] is not Op.EQ:
            raise QuerySyntaxError(
                "HAVING supports only '='", _byte_offset(self._text, op.start_pos)
            )
        if inner != attribute:
            raise QuerySyntaxError(
                f"HAVING compares {attribute!r} with an aggregate over {inner!r}",
                _byte_offset(self._text, func.start_pos),
            )
        return ("having", Having(attribute, name))

    def start(self, children):
        select, table, *clauses = children
        parts = dict(clauses)
        return TableQuery(
            select=select,
            table=table,
            where=parts.get("where", ()),
            group_by=parts.get("group_by"),
            having=parts.get("having"),
            _text=self._text,
        )


def parse_table_query(text: str) -> TableQuery:
    """
    解析 SQL 子集查询

    Raises:
        QuerySyntaxError: 语法错误（带 UTF-8 字节偏移）或未知聚合函数
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
        raise QuerySyntaxError(f"syntax error in table query {text!r}", _byte_offset(text, pos)) from None

    try:
        return _ToAst(text).transform(tree)
    except VisitError as exc:
        raise exc.orig_exc from None
