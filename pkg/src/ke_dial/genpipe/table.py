"""
表格 KB 的 KE 对话生成
======================

核心概念：
---------
1. 每个模板执行自己的查询，结果有多少行就生成多少段对话（单组模板严格成立）
2. 主组 = 模板原始绑定中查询第一个选择属性所在的组，逐行赋给结果行
3. 其余组按结果序号循环偏移取行，且同一对话中各组使用的行互不相同

TABLE_BATCH 与 TABLE_PER_KB 都按模板/样本并行，结果按输入顺序合并。
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

from ke_dial.config.settings import GenerationConfig
from ke_dial.domain.errors import KeDialError, ValidationError
from ke_dial.domain.table import TableKB
from ke_dial.genpipe.corpus import GeneratedCorpus, Provenance
from ke_dial.ke.relex import relex
from ke_dial.ke.template import Template
from ke_dial.tquery.executor import execute_table_query, validate
from ke_dial.tquery.parser import TableQuery, parse_table_query

logger = logging.getLogger(__name__)


def primary_group(t: Template, q: TableQuery) -> int:
    """Group holding the query's first select attribute; falls back to the lowest group."""
    keys = t.keys
    for attribute in q.effective_select:
        groups = sorted(g for a, g in keys if a == attribute)
        if groups:
            return groups[0]
    return min(g for _, g in keys)


def _next_distinct(pool: Sequence[int], start: int, taken: set[int]) -> int | None:
    n = len(pool)
    for probe in range(n):
        row = pool[(start + probe) % n]
        if row not in taken:
            return row
    return None


def _generate_one(
    t: Template, kb: TableKB, cap: int | None, id_prefix: str
) -> list[tuple]:
    q = validate(parse_table_query(t.query), kb)
    if not t.keys:
        logger.warning(f"template {t.id!r} has no placeholders; skipped")
        return []
    for attr, group in t.keys:
        if attr not in kb.attributes:
            raise ValidationError(
                f"template {t.id!r}: group {group} uses {attr!r}, which table {kb.name!r} lacks"
            )

    result = execute_table_query(q, kb)
    if not len(result):
        logger.warning(f"template {t.id!r}: query returned no rows")
        return []

    primary = primary_group(t, q)
    secondary = sorted(g for g in t.groups if g != primary)
    pool = result.indices
    rows = pool if cap is None else pool[:cap]

    out = []
    for i, row in enumerate(rows):
        assigned = {primary: row}
        for j, group in enumerate(secondary, start=1):
            pick = _next_distinct(pool, i + j, set(assigned.values()))
            if pick is None:
                break
            assigned[group] = pick
        if len(assigned) != len(secondary) + 1:
            logger.debug(f"template {t.id!r}: result {i} cannot fill every group with distinct rows")
            continue
        dialogue = relex(
            t,
            {g: kb.row_dict(r) for g, r in assigned.items()},
            t.binding,
            dialogue_id=f"{id_prefix}{t.id}:{i}",
        )
        out.append((dialogue, Provenance(t.id, i, {str(g): r for g, r in sorted(assigned.items())})))
    return out


def generate_table(
    templates: Sequence[Template],
    kb: TableKB,
    cfg: GenerationConfig | None = None,
    max_templates: int | None = None,
    id_prefix: str = "",
) -> GeneratedCorpus:
    """
    批量生成 KE 对话

    Args:
        templates: 模板列表（表格查询）
        kb: 表格知识库
        cfg: 生成配置（result_cap、jobs）
        max_templates: 只使用前 k 个模板
        id_prefix: 生成对话 id 的前缀

    Returns:
        GeneratedCorpus: 按 (模板顺序, 行顺序) 排列
    """
    cfg = cfg if cfg is not None else GenerationConfig()
    chosen = list(templates if max_templates is None else templates[:max_templates])

    def work(t: Template) -> list[tuple]:
        return _generate_one(t, kb, cfg.result_cap, id_prefix)

    if cfg.jobs > 1 and len(chosen) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            batches = list(pool.map(work, chosen))
    else:
        batches = [work(t) for t in chosen]

    corpus = GeneratedCorpus()
    for t, batch in zip(chosen, batches):
        for dialogue, provenance in batch:
            corpus.append(dialogue, provenance)
        logger.info(f"template {t.id!r}: {len(batch)} dialogues")
    return corpus


def generate_per_kb(
    templates: Sequence[Template],
    kbs: Sequence[tuple[str, TableKB]],
    cfg: GenerationConfig | None = None,
) -> dict[str, GeneratedCorpus]:
    """
    每个测试样本使用自己的 KB 独立生成（SMD 协议）

    单个样本失败只记录错误，不影响其它样本。
    """
    cfg = cfg if cfg is not None else GenerationConfig(mode="TABLE_PER_KB")
    serial = cfg.model_copy(update={"jobs": 1})

    def work(item: tuple[str, TableKB]) -> GeneratedCorpus:
        sample_id, kb = item
        try:
            return generate_table(templates, kb, serial, id_prefix=f"{sample_id}/")
        except KeDialError as exc:
            logger.error(f"sample {sample_id!r}: {exc}")
            return GeneratedCorpus(error=str(exc))

    if cfg.jobs > 1 and len(kbs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            corpora = list(pool.map(work, kbs))
    else:
        corpora = [work(item) for item in kbs]

    out = {}
    for (sample_id, _), corpus in zip(kbs, corpora):
        out[sample_id] = corpus
        logger.info(f"sample {sample_id!r}: {len(corpus)} dialogues")
    return out
