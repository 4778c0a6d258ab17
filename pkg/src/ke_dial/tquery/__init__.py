"""SQL-subset user goal queries over table KBs."""

from ke_dial.tquery.aggregate import aggregate, parse_quantity
from ke_dial.tquery.executor import ResultSet, execute_table_query, validate
from ke_dial.tquery.parser import Constraint, Having, Op, TableQuery, parse_table_query

__all__ = [
    "Constraint",
    "Having",
    "Op",
    "ResultSet",
    "TableQuery",
    "aggregate",
    "execute_table_query",
    "parse_quantity",
    "parse_table_query",
    "validate",
]
