"""
执行用户目标查询
================

用法：
    ke-dial query --kb navigation.json --sql "SELECT poi FROM navigation WHERE type = 'gas station'"
    ke-dial query --kb kg.tsv --cypher "MATCH n1-[starred_actors]->n2 RETURN n1, n2" --limit 10
"""

from __future__ import annotations

import argparse

from ke_dial.config.settings import AppConfig, RunConfig
from ke_dial.data.io import load_kb
from ke_dial.domain.errors import ValidationError
from ke_dial.domain.graph import GraphKB
from ke_dial.gquery.matcher import match_pattern
from ke_dial.gquery.parser import parse_graph_query
from ke_dial.tquery.executor import execute_table_query
from ke_dial.tquery.parser import parse_table_query

HELP = "在 KB 上执行 SQL / CYPHER 子集查询"


def add_arguments(ap: argparse.ArgumentParser, common: argparse.ArgumentParser) -> None:
    ap.add_argument(
        "--kb", "--table", "--graph", dest="kb", required=True, help="表格 KB（.json/.csv）或图 KB（.tsv）"
    )
    group = ap.add_mutually_exclusive_group(required=True)
    group.add_argument("--sql", default=None, help="SELECT ... FROM ... 查询")
    group.add_argument("--cypher", default=None, help="MATCH ... RETURN ... 查询")
    ap.add_argument("--limit", type=int, default=None, help="图查询最多返回的绑定数")


def input_args(args: argparse.Namespace) -> list[str]:
    return ["kb"]


def run(args: argparse.Namespace, cfg: AppConfig, run_cfg: RunConfig) -> dict:
    kb = load_kb(args.kb)

    if args.sql is not None:
        if isinstance(kb, GraphKB):
            raise ValidationError("--sql needs a table KB", path=args.kb)
        result = execute_table_query(parse_table_query(args.sql), kb)
        return {
            "attributes": list(result.attributes),
            "count": len(result),
            "rows": [list(r) for r in result.rows],
        }

    if not isinstance(kb, GraphKB):
        raise ValidationError("--cypher needs a graph KB", path=args.kb)
    q = parse_graph_query(args.cypher)
    bindings = match_pattern(q, kb, limit=args.limit)
    return {
        "bindings": [{slot: b[slot] for slot in q.return_slots} for b in bindings],
        "count": len(bindings),
        "query": q.to_text(),
    }


def main() -> None:
    from ke_dial.cli import run_command

    raise SystemExit(run_command("query"))


if __name__ == "__main__":
    main()
