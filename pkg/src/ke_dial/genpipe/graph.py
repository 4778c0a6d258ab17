"""
图 KB 的迭代式 KE 对话生成
==========================

核心流程（每轮迭代）：
---------
1. 用 SplitMix64 有放回地均匀采样 templates_per_iteration 个模板
2. 对每个模板做带 Z 守卫的模式匹配，取第一个可行绑定
3. 回填生成对话，并在 Z 账本中消耗该绑定
4. 记录本轮的 Z 值直方图、跳过的模板数、重复对话数

子图选择：从种子节点出发做双向 BFS，按 BFS 顺序收集边，直到 max_edges。
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from ke_dial.config.settings import GenerationConfig
from ke_dial.domain.errors import KeDialError, NotFound, ValidationError
from ke_dial.domain.graph import GraphKB
from ke_dial.genpipe.corpus import GeneratedCorpus, Provenance
from ke_dial.genpipe.rng import SplitMix64
from ke_dial.gquery.ledger import ZLedger, consume_binding
from ke_dial.gquery.matcher import match_pattern
from ke_dial.gquery.parser import GraphQuery, parse_graph_query
from ke_dial.ke.relex import graph_assignment, relex
from ke_dial.ke.template import Template

logger = logging.getLogger(__name__)


@dataclass
class ZHistory:
    """
    Z 账本随迭代的变化

    records: (iteration, z_value, node_count)，第 0 轮为初始账本
    """

    records: list[tuple[int, int, int]] = field(default_factory=list)
    totals: list[int] = field(default_factory=list)
    zero_counts: list[int] = field(default_factory=list)
    generated: list[int] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)
    duplicates: list[int] = field(default_factory=list)

    def record(self, iteration: int, ledger: ZLedger, generated: int, skipped: int, duplicates: int):
        for z_value, count in ledger.histogram().items():
            self.records.append((iteration, int(z_value), int(count)))
        self.totals.append(ledger.total)
        self.zero_counts.append(ledger.zero_count)
        self.generated.append(generated)
        self.skipped.append(skipped)
        self.duplicates.append(duplicates)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.records, columns=["iteration", "z_value", "node_count"])

    def summary(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "iteration": range(len(self.totals)),
                "z_total": self.totals,
                "zero_nodes": self.zero_counts,
                "generated": self.generated,
                "skipped": self.skipped,
                "duplicates": self.duplicates,
            }
        )

    def to_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator="\n")


def _parse_templates(templates: Sequence[Template], g: GraphKB) -> list[GraphQuery | None]:
    parsed: list[GraphQuery | None] = []
    for t in templates:
        try:
            q = parse_graph_query(t.query).guarded()
            for r in q.relations:
                g.require_relation(r)
            parsed.append(q)
        except KeDialError as exc:
            logger.warning(f"template {t.id!r} unusable on this graph: {exc}")
            parsed.append(None)
    return parsed


def generate_graph_iterative(
    templates: Sequence[Template], g: GraphKB, cfg: GenerationConfig | None = None
) -> tuple[GeneratedCorpus, ZHistory]:
    """
    迭代采样模板生成图 KE 对话

    Args:
        templates: 带图查询的模板
        g: 图知识库（通常是 select_subgraph 的结果）
        cfg: seed、iterations、templates_per_iteration

    Returns:
        (GeneratedCorpus, ZHistory)
    """
    cfg = cfg if cfg is not None else GenerationConfig(mode="GRAPH_ITERATIVE")
    corpus = GeneratedCorpus()
    history = ZHistory()
    ledger = ZLedger.from_graph(g)
    history.record(0, ledger, 0, 0, 0)
    if not templates:
        return corpus, history

    rng = SplitMix64(cfg.seed)
    queries = _parse_templates(templates, g)
    seen_texts: set[tuple[str, ...]] = set()
    step = 0

    for iteration in range(1, cfg.iterations + 1):
        generated = skipped = duplicates = 0
        for _ in range(cfg.templates_per_iteration):
            k = rng.below(len(templates))
            t, q = templates[k], queries[k]
            if q is None:
                skipped += 1
                continue
            bindings = match_pattern(q, g, ledger, limit=1)
            if not bindings:
                skipped += 1
                continue
            binding = bindings[0]
            dialogue = relex(t, graph_assignment(binding), t.binding, dialogue_id=f"{t.id}:{step}")
            ledger = consume_binding(ledger, binding)

            texts = tuple(turn.text for turn in dialogue.turns)
            if texts in seen_texts:
                duplicates += 1
            seen_texts.add(texts)
            corpus.append(dialogue, Provenance(t.id, step, dict(sorted(binding.items()))))
            generated += 1
            step += 1

        history.record(iteration, ledger, generated, skipped, duplicates)
        logger.info(
            f"iteration {iteration}: {generated} dialogues, {skipped} skipped, "
            f"{duplicates} duplicates, {ledger.zero_count} nodes at Z=0"
        )
    return corpus, history


def select_subgraph(g: GraphKB, seeds: Sequence[str], hop: int, max_edges: int) -> GraphKB:
    """
    以种子节点为中心的子图

    双向 BFS：展开深度 < hop 的节点，依 BFS 顺序收集其所有入边和出边，达到 max_edges 即停止。
    关系集合保持与原图一致。

    Raises:
        NotFound: 种子不在图中
    """
    if hop < 1 or max_edges < 0:
        raise ValidationError("hop must be >= 1 and max_edges >= 0")
    for s in seeds:
        if s not in g.nodes:
            raise NotFound(f"unknown seed node {s!r}")

    undirected = g.undirected()
    order = list(dict.fromkeys(seeds))
    depth = {s: 0 for s in order}
    edges: dict[tuple[str, str, str], None] = {}
    nodes = set(order)
    i = 0
    while i < len(order) and len(edges) < max_edges:
        u = order[i]
        i += 1
        if depth[u] >= hop:
            continue
        incident = [(u, r, v) for r, v in g.out_edges(u)] + [(v, r, u) for r, v in g.in_edges(u)]
        for e in sorted(incident):
            if len(edges) >= max_edges:
                break
            if e in edges:
                continue
            edges[e] = None
            nodes.update((e[0], e[2]))
        for v in sorted(undirected.neighbors(u)):
            if v not in depth:
                depth[v] = depth[u] + 1
                order.append(v)

    return GraphKB(frozenset(nodes), g.relations, frozenset(edges))
