"""
表格知识库
==========

TableKB 是一个带名字的关系表：有序属性列表 A、有序行、以及每个属性的取值集合 V_a。
输入文件很少附带取值集合，缺省时由行数据推导（V_a = 出现过的值）。
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import pandas as pd

from ke_dial.domain.errors import NotFound, ValidationError


def derive_ontology(attributes: tuple[str, ...], rows: tuple[tuple[str, ...], ...]) -> dict:
    return {a: frozenset(row[i] for row in rows) for i, a in enumerate(attributes)}


@dataclass(frozen=True)
class TableKB:
    name: str
    attributes: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    ontology: Mapping[str, frozenset[str]] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        attributes = tuple(self.attributes)
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "rows", rows)

        if not attributes:
            raise ValidationError(f"table {self.name!r} has no attributes")
        if len(set(attributes)) != len(attributes):
            raise ValidationError(f"table {self.name!r} has duplicate attribute names")
        for i, row in enumerate(rows):
            if len(row) != len(attributes):
                raise ValidationError(
                    f"table {self.name!r} row {i} has {len(row)} values, expected {len(attributes)}"
                )

        derived = derive_ontology(attributes, rows)
        if not self.ontology:
            object.__setattr__(self, "ontology", derived)
            return
        ontology = {a: frozenset(self.ontology.get(a, ())) for a in attributes}
        for a in attributes:
            missing = derived[a] - ontology[a]
            if missing:
                raise ValidationError(
                    f"table {self.name!r}: values {sorted(missing)} of {a!r} not in its ontology"
                )
        object.__setattr__(self, "ontology", ontology)

    # -------------------------------------------------------------------------
    # 属性访问
    # -------------------------------------------------------------------------

    def index(self, attribute: str) -> int:
        try:
            return self.attributes.index(attribute)
        except ValueError:
            raise NotFound(f"unknown attribute {attribute!r} in table {self.name!r}") from None

    def resolve(self, attribute: str) -> str:
        """Map an attribute name to its canonical spelling (case-insensitive)."""
        if attribute in self.attributes:
            return attribute
        folded = attribute.lower()
        for a in self.attributes:
            if a.lower() == folded:
                return a
        raise NotFound(f"unknown attribute {attribute!r} in table {self.name!r}")

    def row_dict(self, i: int) -> dict[str, str]:
        return dict(zip(self.attributes, self.rows[i]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(list(self.rows), columns=list(self.attributes), dtype=str)

    @property
    def ontology_is_derived(self) -> bool:
        return dict(self.ontology) == derive_ontology(self.attributes, self.rows)

    def __len__(self) -> int:
        return len(self.rows)
