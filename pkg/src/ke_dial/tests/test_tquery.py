"""Tests for the SQL-subset parser, executor and aggregates."""

import math
import random
from fractions import Fraction

import pytest

from ke_dial.domain.errors import (
    AggregateError,
    NotFound,
    QuerySyntaxError,
    QueryTypeError,
    ValidationError,
)
from ke_dial.domain.table import TableKB
from ke_dial.tquery.aggregate import aggregate, parse_quantity
from ke_dial.tquery.executor import execute_table_query
from ke_dial.tquery.parser import Constraint, Having, Op, parse_table_query

# =============================================================================
# 解析
# =============================================================================


class TestParser:
    def test_table_1_query(self, table_1_query: str):
        q = parse_table_query(table_1_query)
        assert q.select == ("type", "poi", "distance", "address")
        assert q.table == "navigation"
        assert q.group_by == "type"
        assert q.having == Having("distance", "MIN", Op.EQ)

    def test_minimal_statement(self):
        q = parse_table_query("SELECT name FROM restaurant")
        assert q.where == ()
        assert q.group_by is None
        assert q.having is None

    def test_five_attribute_select(self):
        q = parse_table_query("SELECT area, food, price, name, phone FROM Restaurant")
        assert len(q.select) == 5

    def test_keywords_case_insensitive_and_quoted_values(self):
        q = parse_table_query("select poi from navigation where type = 'gas station' and poi != 'Joe''s'")
        assert q.where == (
            Constraint("type", Op.EQ, "gas station"),
            Constraint("poi", Op.NEQ, "Joe's"),
        )

    @pytest.mark.parametrize("spelling, op", [("==", Op.EQ), ("<>", Op.NEQ), ("<=", Op.LEQ), (">", Op.GT)])
    def test_operator_spellings(self, spelling, op):
        q = parse_table_query(f"SELECT a FROM t WHERE a {spelling} 3")
        assert q.where[0].op is op

    def test_to_text_reparses(self, table_1_query: str):
        q = parse_table_query("SELECT poi FROM navigation WHERE type = 'gas station'")
        assert parse_table_query(q.to_text()) == q
        assert parse_table_query(parse_table_query(table_1_query).to_text()).having.aggregate == "MIN"

    def test_syntax_error_reports_byte_offset(self):
        text = "SELECT name FROM café WHERE prix ~ 5"
        with pytest.raises(QuerySyntaxError) as exc:
            parse_table_query(text)
        assert exc.value.offset == len(text[: text.index("~")].encode("utf-8"))

    def test_unknown_aggregate(self):
        with pytest.raises(QuerySyntaxError):
            parse_table_query("SELECT a FROM t GROUP BY a HAVING b = MEDIAN(b)")

    def test_missing_from(self):
        with pytest.raises(QuerySyntaxError):
            parse_table_query("SELECT name restaurant")


# =============================================================================
# 执行
# =============================================================================


class TestExecutor:
    def test_table_1_results(self, navigation_kb: TableKB, table_1_query: str):
        result = execute_table_query(table_1_query, navigation_kb)
        assert result.attributes == ("type", "poi", "distance", "address")
        assert result.rows == (
            ("gas station", "Valero", "5 miles", "91 el camino real"),
            ("grocery store", "safeway", "4 miles", "452 arcadia pl"),
            ("restaurant", "pizzahut", "3 miles", "915 arbol dr"),
        )
        assert result.indices == (0, 2, 4)

    def test_select_star_returns_all_rows(self, navigation_kb: TableKB):
        result = execute_table_query("SELECT * FROM navigation", navigation_kb)
        assert result.rows == navigation_kb.rows

    def test_where_attributes_extend_projection(self, camrest_kb: TableKB):
        result = execute_table_query("SELECT name FROM restaurant WHERE area = east", camrest_kb)
        assert result.attributes == ("name", "area")
        assert [r[0] for r in result.rows] == ["curry prince", "rajmahal"]

    def test_string_equality_ignores_case(self, navigation_kb: TableKB):
        result = execute_table_query("SELECT poi FROM navigation WHERE type = 'GAS  Station'", navigation_kb)
        assert len(result) == 2

    def test_numeric_comparison_with_units(self, navigation_kb: TableKB):
        result = execute_table_query("SELECT poi FROM navigation WHERE distance < '5 miles'", navigation_kb)
        assert [r[0] for r in result.rows] == ["safeway", "pizzahut"]

    def test_unit_mismatch(self, navigation_kb: TableKB):
        with pytest.raises(QueryTypeError):
            execute_table_query("SELECT poi FROM navigation WHERE distance < 5", navigation_kb)

    def test_wrong_table_and_unknown_attribute(self, navigation_kb: TableKB):
        with pytest.raises(ValidationError):
            execute_table_query("SELECT poi FROM restaurant", navigation_kb)
        with pytest.raises(NotFound):
            execute_table_query("SELECT rating FROM navigation", navigation_kb)

    def test_where_order_does_not_matter(self, camrest_kb: TableKB):
        a = execute_table_query(
            "SELECT name FROM restaurant WHERE area = east AND price = moderate", camrest_kb
        )
        b = execute_table_query(
            "SELECT name FROM restaurant WHERE price = moderate AND area = east", camrest_kb
        )
        assert a.indices == b.indices == (0, 1)
        assert set(a.attributes) == set(b.attributes)

    def test_having_without_group_by(self, navigation_kb: TableKB):
        result = execute_table_query(
            "SELECT poi FROM navigation HAVING distance = MAX(distance)", navigation_kb
        )
        assert result.rows == (("whole foods", "7 miles"),)

    def test_having_keeps_ties(self, navigation_kb: TableKB):
        result = execute_table_query(
            "SELECT poi FROM navigation WHERE distance >= '5 miles' HAVING distance = MIN(distance)",
            navigation_kb,
        )
        assert [r[0] for r in result.rows] == ["Valero", "panda express"]


# =============================================================================
# 聚合
# =============================================================================


class TestAggregate:
    def test_min(self):
        assert aggregate(["5 miles", "4 miles", "3 miles"], "MIN") == "3 miles"

    def test_singleton_max(self):
        assert aggregate(["7"], "MAX") == "7"

    def test_avg(self):
        assert aggregate(["2 miles", "4 miles"], "AVG") == "3 miles"

    def test_avg_rounds_half_up(self):
        assert aggregate(["1.5", "2.0"], "AVG") == "1.8"

    def test_sum(self):
        assert aggregate(["1.5 km", "2 km"], "sum") == "3.5 km"

    def test_empty_and_mixed_units(self):
        with pytest.raises(AggregateError):
            aggregate([], "MIN")
        with pytest.raises(AggregateError):
            aggregate(["3 miles", "4 km"], "MAX")

    def test_parse_quantity(self):
        value, unit = parse_quantity("3 Miles")
        assert value == 3
        assert unit == "miles"
        with pytest.raises(QueryTypeError):
            parse_quantity("far")


# =============================================================================
# 与暴力枚举 oracle 对比
# =============================================================================

WORDS = ["red", "blue", "green", "gold"]
NUMERIC_OPS = ["=", "!=", "<", ">", "<=", ">="]
AGGREGATES = ["MIN", "MAX", "SUM", "AVG"]


def _quantity(v: str) -> int:
    return int(v.split()[0])


def _oracle(attrs, rows, select, where, group_by, having):
    """直接枚举：过滤、分组、聚合、投影"""
    col = {a: i for i, a in enumerate(attrs)}

    def holds(row, attribute, op, value):
        x = row[col[attribute]]
        if op == "=":
            return x == value
        if op == "!=":
            return x != value
        left, right = _quantity(x), _quantity(value)
        return {"<": left < right, ">": left > right, "<=": left <= right, ">=": left >= right}[op]

    keep = [i for i, row in enumerate(rows) if all(holds(row, *c) for c in where)]
    if having is not None and keep:
        attribute, func = having
        groups: dict = {}
        for i in keep:
            groups.setdefault(rows[i][col[group_by]] if group_by else None, []).append(i)
        kept = []
        for members in groups.values():
            values = [_quantity(rows[i][col[attribute]]) for i in members]
            if func == "MIN":
                target = min(values)
            elif func == "MAX":
                target = max(values)
            elif func == "SUM":
                target = sum(values)
            else:
                target = math.floor(Fraction(sum(values), len(values)) + Fraction(1, 2))
            kept += [i for i, v in zip(members, values) if v == target]
        keep = sorted(kept)

    projection = list(attrs) if select == ["*"] else list(select)
    for a in [c[0] for c in where] + ([having[0]] if having else []):
        if a not in projection:
            projection.append(a)
    return tuple(projection), tuple(tuple(rows[i][col[a]] for a in projection) for i in keep)


def _random_case(rng: random.Random):
    attrs = [f"a{i}" for i in range(rng.randint(1, 4))]
    numeric = {a: rng.random() < 0.5 for a in attrs}
    rows = [
        tuple(f"{rng.randint(0, 9)} km" if numeric[a] else rng.choice(WORDS) for a in attrs)
        for _ in range(rng.randint(0, 8))
    ]

    where = []
    for _ in range(rng.randint(0, 2)):
        a = rng.choice(attrs)
        if numeric[a]:
            where.append((a, rng.choice(NUMERIC_OPS), f"{rng.randint(0, 9)} km"))
        else:
            where.append((a, rng.choice(["=", "!="]), rng.choice(WORDS)))
    group_by = rng.choice(attrs) if rng.random() < 0.4 else None
    numeric_attrs = [a for a in attrs if numeric[a]]
    having = None
    if numeric_attrs and rng.random() < 0.5:
        having = (rng.choice(numeric_attrs), rng.choice(AGGREGATES))
    select = ["*"] if rng.random() < 0.2 else rng.sample(attrs, rng.randint(1, len(attrs)))

    text = f"SELECT {', '.join(select)} FROM kb"
    if where:
        text += " WHERE " + " AND ".join(f"{a} {op} '{v}'" for a, op, v in where)
    if group_by:
        text += f" GROUP BY {group_by}"
    if having:
        text += f" HAVING {having[0]} = {having[1]}({having[0]})"
    kb = TableKB("kb", tuple(attrs), tuple(rows))
    return kb, text, _oracle(attrs, rows, select, where, group_by, having)


def test_random_queries_match_oracle():
    """
    测试：1000 个随机小表 + 随机查询与暴力枚举结果完全一致

    场景：
    - 每张表至多 8 行、4 个属性，数值属性带统一单位 km
    - 查询随机组合 WHERE / GROUP BY / HAVING
    """
    rng = random.Random(20240613)
    for _ in range(1000):
        kb, text, (attributes, rows) = _random_case(rng)
        result = execute_table_query(text, kb)
        assert result.attributes == attributes, text
        assert result.rows == rows, text
