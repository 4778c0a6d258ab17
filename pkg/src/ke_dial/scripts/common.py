from __future__ import annotations

from ke_dial.config.settings import AppConfig
from ke_dial.domain.graph import GraphKB
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.domain.table import TableKB


def lexicon_for(kb: TableKB | GraphKB, cfg: AppConfig) -> EntityLexicon:
    """Entity lexicon for a KB using the configured matching rule."""
    if isinstance(kb, GraphKB):
        rule = cfg.lexicon.graph
        return EntityLexicon.from_graph(kb, rule.min_length, rule.case_sensitive)
    rule = cfg.lexicon.table
    return EntityLexicon.from_table(kb, rule.min_length, rule.case_sensitive)


def split_list(value: str | None) -> list[str]:
    if not value:
        return []
    return [x.strip() for x in value.split(",") if x.strip()]
