"""
合成语料生成器
==============

用于自包含测试，模拟 bAbI 的 Test / Test OOV 划分。

核心概念：
---------
1. KB：n_rows 行、n_attributes 个属性，每个取值在全表唯一（如 ``resto007``）
2. 行按种子打乱后切分：oov_fraction 比例的行为 OOV，只出现在 KE 对话中
3. 每个模板有自己的标记词（``t03``），因此不同模板的历史互不相交
4. base：每个模板覆盖一半的词表内行（按奇偶轮换）；test：另一半词表内行；
   oov_test：全部 OOV 行。所有对话都恰好是 relex(模板, 行)

使用示例：
---------
>>> corpus = synth_corpus(SyntheticSpec(n_rows=20, oov_fraction=0.5))
>>> len(corpus.oov_rows)
10
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ke_dial.config.settings import SyntheticSpec
from ke_dial.domain.dialogue import Dialogue, Speaker, Turn
from ke_dial.domain.errors import ValidationError
from ke_dial.domain.graph import GraphKB
from ke_dial.domain.lexicon import NODE_TAG
from ke_dial.domain.table import TableKB
from ke_dial.genpipe.rng import SplitMix64
from ke_dial.gquery.parser import GraphQuery, PatternEdge
from ke_dial.ke.relex import relex
from ke_dial.ke.template import BindingMap, Template, placeholder

SYNTH_TABLE = "synth"

# 属性名 -> 取值前缀
ATTRIBUTES = {
    "name": "resto",
    "area": "zone",
    "food": "dish",
    "price": "tier",
    "phone": "tel",
    "address": "street",
    "postcode": "pc",
    "rating": "stars",
}


@dataclass
class SynthCorpus:
    kb: TableKB
    base: list[Dialogue]
    templates: list[Template]
    test: list[Dialogue]
    oov_test: list[Dialogue]
    in_vocab_rows: list[int]
    oov_rows: list[int]


def _build_kb(spec: SyntheticSpec) -> TableKB:
    attributes = list(ATTRIBUTES)[: spec.n_attributes]
    rows = [tuple(f"{ATTRIBUTES[a]}{i:03d}" for a in attributes) for i in range(spec.n_rows)]
    return TableKB(SYNTH_TABLE, tuple(attributes), tuple(rows))


def _build_template(j: int, kb: TableKB, rng: SplitMix64, binding_row: int) -> Template:
    others = list(kb.attributes[1:])
    constraints = rng.sample(others, min(2, len(others)))
    requested = rng.choice(others)
    tag = f"t{j:02d}"

    wanted = " and ".join(placeholder(a, 0) for a in constraints)
    turns = (
        Turn(Speaker.USR, f"hello , {tag} : i want a place with {wanted}"),
        Turn(Speaker.SYS, f"{tag} : {placeholder('name', 0)} matches , it has {placeholder(constraints[0], 0)}"),
        Turn(Speaker.USR, f"{tag} : what about the {requested} ?"),
        Turn(Speaker.SYS, f"{tag} : the {requested} of {placeholder('name', 0)} is {placeholder(requested, 0)}"),
        Turn(Speaker.USR, f"thanks for {tag}"),
        Turn(Speaker.SYS, f"{tag} : you are welcome"),
    )
    used = ["name", *dict.fromkeys(constraints + [requested])]
    query = f"SELECT {', '.join(used)} FROM {kb.name}"

    row = kb.row_dict(binding_row)
    binding = BindingMap({(a, 0): row[a] for a in used})
    return Template(f"tpl-{j:02d}", turns, query, binding)


def split_rows(n_rows: int, oov_fraction: float, rng: SplitMix64) -> tuple[list[int], list[int]]:
    """Return (in-vocab rows, OOV rows), both in KB order."""
    n_oov = math.floor(n_rows * oov_fraction + 0.5)
    if n_oov == 0 or n_oov == n_rows:
        raise ValidationError(
            f"oov_fraction={oov_fraction} leaves an empty partition of {n_rows} rows"
        )
    order = list(range(n_rows))
    rng.shuffle(order)
    oov = sorted(order[:n_oov])
    in_vocab = sorted(order[n_oov:])
    return in_vocab, oov


def synth_corpus(spec: SyntheticSpec | None = None) -> SynthCorpus:
    """
    生成合成 KB、模板和三份对话集

    Raises:
        ValidationError: OOV 比例使某一划分为空
    """
    spec = spec if spec is not None else SyntheticSpec()
    rng = SplitMix64(spec.seed)
    kb = _build_kb(spec)
    in_vocab, oov = split_rows(spec.n_rows, spec.oov_fraction, rng)
    templates = [_build_template(j, kb, rng, in_vocab[0]) for j in range(spec.n_templates)]

    base, test, oov_test = [], [], []
    for j, t in enumerate(templates):
        for idx, r in enumerate(in_vocab):
            target, split = (base, "base") if (idx + j) % 2 == 0 else (test, "test")
            target.append(relex(t, {0: kb.row_dict(r)}, t.binding, dialogue_id=f"{split}-{j:02d}-{r:03d}"))
        for r in oov:
            oov_test.append(relex(t, {0: kb.row_dict(r)}, t.binding, dialogue_id=f"oov-{j:02d}-{r:03d}"))

    return SynthCorpus(kb, base, templates, test, oov_test, in_vocab, oov)


# =============================================================================
# 合成图
# =============================================================================


def synth_graph(n_nodes: int, n_relations: int, n_edges: int, seed: int) -> GraphKB:
    """Random directed KG; node names are ``entity<k>`` (long enough for graph lexicons)."""
    if n_nodes < 2:
        raise ValidationError("a synthetic graph needs at least two nodes")
    rng = SplitMix64(seed)
    nodes = [f"entity{i:03d}" for i in range(n_nodes)]
    relations = [f"rel{k}" for k in range(max(1, n_relations))]
    edges = set()
    for _ in range(n_edges):
        head = rng.choice(nodes)
        tail = rng.choice(nodes)
        if head != tail:
            edges.add((head, rng.choice(relations), tail))
    return GraphKB(frozenset(nodes), frozenset(relations), frozenset(edges))


def synth_graph_templates(g: GraphKB, n_templates: int, seed: int) -> list[Template]:
    """
    Single-edge and two-edge chain templates drawn from edges of ``g``.

    Each template mentions every slot once; its binding records the edge it was drawn from.
    """
    rng = SplitMix64(seed)
    edges = sorted(g.edges)
    if not edges:
        return []
    templates = []
    for j in range(n_templates):
        head, rel, tail = rng.choice(edges)
        pattern = [PatternEdge("n1", rel, "n2")]
        nodes = {"n1": head, "n2": tail}
        onward = [(r, v) for r, v in g.out_edges(tail) if v != head]
        if j % 2 == 1 and onward:
            rel2, third = rng.choice(onward)
            pattern.append(PatternEdge("n2", rel2, "n3"))
            nodes["n3"] = third
        q = GraphQuery(tuple(pattern), tuple(nodes), True)

        mention = " and ".join(placeholder(NODE_TAG, int(s[1:])) for s in nodes)
        turns = (
            Turn(Speaker.USR, f"what do you know about {placeholder(NODE_TAG, 1)} ?"),
            Turn(Speaker.SYS, f"it is connected with {mention} ."),
        )
        binding = BindingMap({(NODE_TAG, int(s[1:])): n for s, n in nodes.items()})
        templates.append(Template(f"gtpl-{j:02d}", turns, q.to_text(), binding))
    return templates
