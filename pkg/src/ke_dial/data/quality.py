from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from ke_dial.domain.dialogue import Dialogue
from ke_dial.domain.table import TableKB
from ke_dial.ke.template import Template, placeholders
from ke_dial.tquery.parser import parse_table_query

logger = logging.getLogger(__name__)


@dataclass
class DelexQualityReport:
    """Summary of a delex run over a dialogue file."""

    dialogues: int
    templates: int
    skipped_entities: int
    ambiguities: int
    missing_queries: int

    def to_dict(self) -> dict[str, int]:
        return {
            "ambiguities": self.ambiguities,
            "dialogues": self.dialogues,
            "missing_queries": self.missing_queries,
            "skipped_entities": self.skipped_entities,
            "templates": self.templates,
        }


def validate_dialogues(dialogues: Sequence[Dialogue], queries: dict[str, str]) -> list[str]:
    """
    Check a dialogue file against its query file before delexicalization.

    Returns:
        List of issue strings (empty if no issues).
    """
    issues = []

    if not dialogues:
        return issues

    ids = {d.id for d in dialogues}
    missing = sorted(ids - set(queries))
    if missing:
        issues.append(f"{len(missing)} dialogues have no query: {missing[:5]}")

    unused = sorted(set(queries) - ids)
    if unused:
        issues.append(f"{len(unused)} queries name unknown dialogues: {unused[:5]}")

    no_response = [d.id for d in dialogues if not d.system_turns()]
    if no_response:
        issues.append(f"{len(no_response)} dialogues have no system response: {no_response[:5]}")

    return issues


def validate_templates(templates: Sequence[Template], kb: TableKB | None = None) -> list[str]:
    """
    Check templates before generation.

    Table templates are checked against ``kb``: the query must parse and every placeholder
    attribute must be a KB attribute.
    """
    issues = []

    ids = [t.id for t in templates]
    if len(set(ids)) != len(ids):
        issues.append("Duplicate template ids")

    empty = [t.id for t in templates if not t.keys]
    if empty:
        issues.append(f"{len(empty)} templates have no placeholders: {empty[:5]}")

    if kb is None:
        return issues

    for t in templates:
        try:
            parse_table_query(t.query)
        except Exception as e:
            issues.append(f"template {t.id!r}: {e}")
            continue
        used = {a for turn in t.turns for a, _ in placeholders(turn.text)}
        unknown = sorted(used - set(kb.attributes))
        if unknown:
            issues.append(f"template {t.id!r} uses attributes not in {kb.name!r}: {unknown}")

    for issue in issues:
        logger.warning(issue)
    return issues
