"""
文件格式读写
============

所有文件均为 UTF-8、LF 换行；JSON 输出按键排序，因此读写可字节级往返。

- 表格 KB：JSON ``{"name", "attributes", "rows"[, "ontology"]}`` 或带表头的 CSV（pandas）
- 多 KB（SMD 每样本一个 KB）：JSON ``{sample_id: 表格 KB 对象}``
- 图 KB：TSV，每行 ``head<TAB>relation<TAB>tail``
- 对话：JSONL，每行 ``{"id", "turns": [{"speaker", "text"}], "domain"?}``
- KE 语料：对话 JSONL，每行额外带 ``provenance``
- 模板：JSON 列表 ``[{"id", "turns", "query", "binding"}]``
- 查询：JSON ``{dialogue_id: query}``
- 目标：JSON ``{dialogue_id: {"constraints": {...}, "requests": [...]}}``

格式错误统一抛出 ValidationError，并指出文件名和行号。
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from ke_dial.domain.dialogue import Dialogue, Speaker, Turn
from ke_dial.domain.errors import KeDialError, ValidationError
from ke_dial.domain.graph import GraphKB
from ke_dial.domain.table import TableKB
from ke_dial.genpipe.corpus import GeneratedCorpus
from ke_dial.ke.template import BindingMap, Template
from ke_dial.score.inform import Goal

logger = logging.getLogger(__name__)


# =============================================================================
# 记录模型（pydantic 校验）
# =============================================================================


class TurnRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    speaker: Speaker
    text: str


class DialogueRecord(BaseModel):
    model_config = ConfigDict(extra="ignore")

    id: str
    turns: list[TurnRecord]
    domain: str | None = None

    def to_dialogue(self) -> Dialogue:
        return Dialogue(self.id, tuple(Turn(t.speaker, t.text) for t in self.turns), self.domain)


class TableRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    attributes: list[str]
    rows: list[list[str]]
    ontology: dict[str, list[str]] | None = None


class TemplateRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    turns: list[TurnRecord]
    query: str
    binding: dict[str, str] = Field(default_factory=dict)


class GoalRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    constraints: dict[str, str] = Field(default_factory=dict)
    requests: list[str] = Field(default_factory=list)


# =============================================================================
# 通用工具
# =============================================================================


def dumps_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def dumps_line(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def write_text(path: str | Path, text: str) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return p


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValidationError(e.msg, path=str(path), line=e.lineno) from None


def _iter_jsonl(path: Path) -> Iterable[tuple[int, Any]]:
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as e:
                raise ValidationError(e.msg, path=str(path), line=lineno) from None


def _validate(model: type[BaseModel], data: Any, path: Path, line: int | None = None):
    try:
        return model.model_validate(data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(x) for x in first["loc"])
        raise ValidationError(f"{where}: {first['msg']}", path=str(path), line=line) from None


# =============================================================================
# 表格 KB
# =============================================================================


def _table_from_record(rec: TableRecord) -> TableKB:
    ontology = {a: frozenset(v) for a, v in rec.ontology.items()} if rec.ontology else {}
    return TableKB(rec.name, tuple(rec.attributes), tuple(tuple(r) for r in rec.rows), ontology)


def table_to_json(kb: TableKB) -> dict:
    data: dict[str, Any] = {
        "attributes": list(kb.attributes),
        "name": kb.name,
        "rows": [list(r) for r in kb.rows],
    }
    if not kb.ontology_is_derived:
        data["ontology"] = {a: sorted(v) for a, v in kb.ontology.items()}
    return data


def load_table_kb(path: str | Path) -> TableKB:
    """
    读取表格 KB（JSON 或 CSV）

    CSV 的表名取文件名（不含扩展名），所有取值按字符串读取。
    """
    p = Path(path)
    try:
        if p.suffix.lower() == ".csv":
            frame = pd.read_csv(p, dtype=str, keep_default_na=False, encoding="utf-8")
            rows = tuple(frame.itertuples(index=False, name=None))
            return TableKB(p.stem, tuple(frame.columns), rows)
        return _table_from_record(_validate(TableRecord, _read_json(p), p))
    except KeDialError as e:
        if isinstance(e, ValidationError) and e.path is not None:
            raise
        raise ValidationError(str(e), path=str(p)) from None


def save_table_kb(kb: TableKB, path: str | Path) -> Path:
    p = Path(path)
    if p.suffix.lower() == ".csv":
        p.parent.mkdir(parents=True, exist_ok=True)
        kb.to_frame().to_csv(p, index=False, lineterminator="\n", encoding="utf-8")
        return p
    return write_text(p, dumps_json(table_to_json(kb)))


def load_table_kbs(path: str | Path) -> dict[str, TableKB]:
    """Per-sample KBs: a JSON object mapping sample id to a table KB object."""
    p = Path(path)
    data = _read_json(p)
    if not isinstance(data, dict):
        raise ValidationError("expected an object of sample id -> table", path=str(p))
    kbs = {}
    for sample_id in sorted(data):
        try:
            kbs[sample_id] = _table_from_record(_validate(TableRecord, data[sample_id], p))
        except KeDialError as e:
            raise ValidationError(f"sample {sample_id!r}: {e}", path=str(p)) from None
    return kbs


def is_per_kb_file(path: str | Path) -> bool:
    p = Path(path)
    if p.suffix.lower() != ".json":
        return False
    data = _read_json(p)
    return isinstance(data, dict) and "attributes" not in data


# =============================================================================
# 图 KB
# =============================================================================


def load_graph_kb(path: str | Path) -> GraphKB:
    p = Path(path)
    triples = []
    with p.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not all(x.strip() for x in parts):
                raise ValidationError(
                    f"expected head<TAB>relation<TAB>tail, got {len(parts)} fields",
                    path=str(p),
                    line=lineno,
                )
            triples.append(tuple(x.strip() for x in parts))
    if len(set(triples)) != len(triples):
        logger.warning(f"{p}: {len(triples) - len(set(triples))} duplicate triples dropped")
    return GraphKB.from_triples(triples)


def save_graph_kb(g: GraphKB, path: str | Path) -> Path:
    return write_text(path, "".join(f"{h}\t{r}\t{t}\n" for h, r, t in sorted(g.edges)))


def load_kb(path: str | Path) -> TableKB | GraphKB:
    """Dispatch on extension: ``.tsv`` is a graph KB, everything else a table KB."""
    p = Path(path)
    if p.suffix.lower() == ".tsv":
        return load_graph_kb(p)
    return load_table_kb(p)


# =============================================================================
# 对话与语料
# =============================================================================


def dialogue_to_json(d: Dialogue) -> dict:
    data: dict[str, Any] = {
        "id": d.id,
        "turns": [{"speaker": t.speaker.value, "text": t.text} for t in d.turns],
    }
    if d.domain is not None:
        data["domain"] = d.domain
    return data


def load_dialogues(path: str | Path) -> list[Dialogue]:
    p = Path(path)
    dialogues = []
    seen: set[str] = set()
    for lineno, data in _iter_jsonl(p):
        rec = _validate(DialogueRecord, data, p, lineno)
        try:
            d = rec.to_dialogue()
        except ValidationError as e:
            raise ValidationError(str(e), path=str(p), line=lineno) from None
        if d.id in seen:
            raise ValidationError(f"duplicate dialogue id {d.id!r}", path=str(p), line=lineno)
        seen.add(d.id)
        dialogues.append(d)
    return dialogues


def save_dialogues(dialogues: Sequence[Dialogue], path: str | Path) -> Path:
    return write_text(path, "".join(dumps_line(dialogue_to_json(d)) + "\n" for d in dialogues))


def save_corpus(corpus: GeneratedCorpus, path: str | Path) -> Path:
    lines = []
    for d, prov in zip(corpus.dialogues, corpus.provenance):
        record = dialogue_to_json(d)
        record["provenance"] = prov.to_json()
        lines.append(dumps_line(record) + "\n")
    return write_text(path, "".join(lines))


# =============================================================================
# 模板、查询、目标
# =============================================================================


def template_to_json(t: Template) -> dict:
    return {
        "binding": t.binding.to_json(),
        "id": t.id,
        "query": t.query,
        "turns": [{"speaker": x.speaker.value, "text": x.text} for x in t.turns],
    }


def load_templates(path: str | Path) -> list[Template]:
    p = Path(path)
    if p.suffix.lower() == ".jsonl":
        items = list(_iter_jsonl(p))
    else:
        data = _read_json(p)
        if not isinstance(data, list):
            raise ValidationError("expected a list of templates", path=str(p))
        items = [(None, x) for x in data]
    templates = []
    for lineno, data in items:
        rec = _validate(TemplateRecord, data, p, lineno)
        try:
            turns = tuple(Turn(x.speaker, x.text) for x in rec.turns)
            templates.append(Template(rec.id, turns, rec.query, BindingMap.from_json(rec.binding)))
        except ValidationError as e:
            raise ValidationError(f"template {rec.id!r}: {e}", path=str(p), line=lineno) from None
    return templates


def save_templates(templates: Sequence[Template], path: str | Path) -> Path:
    return write_text(path, dumps_json([template_to_json(t) for t in templates]))


def load_queries(path: str | Path) -> dict[str, str]:
    p = Path(path)
    data = _read_json(p)
    if not isinstance(data, dict) or not all(isinstance(v, str) for v in data.values()):
        raise ValidationError("expected an object of dialogue id -> query string", path=str(p))
    return dict(data)


def save_queries(queries: dict[str, str], path: str | Path) -> Path:
    return write_text(path, dumps_json(queries))


def load_goals(path: str | Path) -> dict[str, Goal]:
    p = Path(path)
    data = _read_json(p)
    if not isinstance(data, dict):
        raise ValidationError("expected an object of dialogue id -> goal", path=str(p))
    goals = {}
    for dialogue_id, raw in data.items():
        rec = _validate(GoalRecord, raw, p)
        goals[dialogue_id] = Goal(dict(rec.constraints), tuple(rec.requests))
    return goals


def save_goals(goals: dict[str, Goal], path: str | Path) -> Path:
    data = {
        k: {"constraints": dict(g.constraints), "requests": list(g.requests)}
        for k, g in goals.items()
    }
    return write_text(path, dumps_json(data))
