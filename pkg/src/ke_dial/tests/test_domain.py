"""Tests for the dialogue, table and graph data model."""

import random
from collections import deque

import pytest

from ke_dial.domain.dialogue import Dialogue, Speaker, Turn, strip_api_turns
from ke_dial.domain.errors import NotFound, ValidationError
from ke_dial.domain.graph import GraphKB, neighbors, neighbors_h
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.domain.table import TableKB


def _random_graph(rng: random.Random, n_nodes: int, n_edges: int, relations=("r0", "r1", "r2")):
    nodes = [f"v{i:02d}" for i in range(n_nodes)]
    triples = {(rng.choice(nodes), rng.choice(relations), rng.choice(nodes)) for _ in range(n_edges)}
    return GraphKB.from_triples(triples, nodes=nodes, relations=relations)


def _bfs_oracle(edges, start, allowed, h):
    """逐层 BFS：不经过 networkx，直接扫描边表"""
    depth = {start: 0}
    queue = deque([start])
    reached = set()
    while queue:
        u = queue.popleft()
        if depth[u] == h:
            continue
        for head, rel, tail in edges:
            if head == u and rel in allowed:
                reached.add(tail)
                if tail not in depth:
                    depth[tail] = depth[u] + 1
                    queue.append(tail)
    return reached


# =============================================================================
# 对话
# =============================================================================


class TestDialogue:
    def test_turn_text_normalized(self):
        t = Turn(Speaker.USR, "  where   is\tthe  station ")
        assert t.text == "where is the station"
        assert t.tokens == ["where", "is", "the", "station"]

    def test_empty_turn_rejected(self):
        with pytest.raises(ValidationError):
            Turn(Speaker.SYS, "   ")

    def test_speaker_pattern_with_api_call(self):
        d = Dialogue(
            "d1",
            (
                Turn(Speaker.USR, "book a table"),
                Turn(Speaker.SYS_API, "api_call italian rome"),
                Turn(Speaker.API, "resto_1 r_phone 123"),
                Turn(Speaker.SYS, "resto_1 is free"),
                Turn(Speaker.USR, "thanks"),
            ),
        )
        assert [t.text for t in d.system_turns()] == ["resto_1 is free"]
        assert [t.speaker for t in strip_api_turns(d).turns] == [
            Speaker.USR,
            Speaker.SYS,
            Speaker.USR,
        ]

    @pytest.mark.parametrize(
        "speakers",
        [
            [Speaker.SYS, Speaker.USR],
            [Speaker.USR, Speaker.USR],
            [Speaker.USR, Speaker.API, Speaker.SYS],
        ],
    )
    def test_speaker_pattern_violations(self, speakers):
        with pytest.raises(ValidationError):
            Dialogue("bad", tuple(Turn(s, "x") for s in speakers))

    def test_exchanges_history(self, navigation_dialogue: Dialogue):
        ((history, response),) = navigation_dialogue.exchanges()
        assert [t.text for t in history] == ["where is the closest gas station ?"]
        assert response.text.startswith("valero")


# =============================================================================
# 表格 KB
# =============================================================================


class TestTableKB:
    def test_ontology_derived_from_rows(self, navigation_kb: TableKB):
        assert navigation_kb.ontology["type"] == {"gas station", "grocery store", "restaurant"}
        assert navigation_kb.ontology_is_derived

    def test_row_length_mismatch(self):
        with pytest.raises(ValidationError):
            TableKB("t", ("a", "b"), (("1",),))

    def test_duplicate_attributes(self):
        with pytest.raises(ValidationError):
            TableKB("t", ("a", "a"), ())

    def test_value_outside_ontology(self):
        with pytest.raises(ValidationError):
            TableKB("t", ("a",), (("x",),), ontology={"a": frozenset({"y"})})

    def test_resolve_is_case_insensitive(self, navigation_kb: TableKB):
        assert navigation_kb.resolve("POI") == "poi"
        with pytest.raises(NotFound):
            navigation_kb.resolve("rating")

    def test_to_frame(self, navigation_kb: TableKB):
        frame = navigation_kb.to_frame()
        assert list(frame.columns) == ["poi", "type", "distance", "address"]
        assert len(frame) == 6


# =============================================================================
# 图 KB 与邻居
# =============================================================================


class TestNeighbors:
    def test_single_edge(self):
        g = GraphKB.from_triples([("Daniel Craig", "ActorsIn", "Quantum of Solace")])
        assert neighbors(g, "Daniel Craig", "ActorsIn") == {"Quantum of Solace"}

    def test_no_outgoing_edges(self):
        g = GraphKB.from_triples([("a", "r", "b")])
        assert neighbors(g, "b", "r") == set()

    def test_unknown_node_and_relation(self):
        g = GraphKB.from_triples([("a", "r", "b")])
        with pytest.raises(NotFound):
            neighbors(g, "c", "r")
        with pytest.raises(NotFound):
            neighbors(g, "a", "s")

    def test_edge_with_unknown_node_rejected(self):
        with pytest.raises(ValidationError):
            GraphKB(frozenset({"a"}), frozenset({"r"}), frozenset({("a", "r", "b")}))

    def test_chain_two_hops(self):
        g = GraphKB.from_triples([("a", "r", "b"), ("b", "r", "c")])
        assert neighbors_h(g, "a", {"r"}, 2) == {"b", "c"}

    def test_hop_count_must_be_positive(self):
        g = GraphKB.from_triples([("a", "r", "b")])
        with pytest.raises(ValidationError):
            neighbors_h(g, "a", {"r"}, 0)

    def test_one_hop_is_union_of_neighbors(self):
        rng = random.Random(7)
        g = _random_graph(rng, 15, 40)
        for n in sorted(g.nodes):
            union = set().union(*(neighbors(g, n, r) for r in ("r0", "r2")))
            assert neighbors_h(g, n, {"r0", "r2"}, 1) == union

    def test_random_graphs_match_bfs_oracle(self):
        rng = random.Random(13)
        for _ in range(20):
            g = _random_graph(rng, 30, rng.randint(10, 80))
            allowed = set(rng.sample(["r0", "r1", "r2"], rng.randint(1, 3)))
            for n in sorted(g.nodes):
                assert neighbors_h(g, n, allowed, 2) == _bfs_oracle(g.edges, n, allowed, 2)

    def test_neighbors_subset_of_h_hops(self):
        rng = random.Random(3)
        g = _random_graph(rng, 20, 50)
        for n in sorted(g.nodes):
            for h in (1, 2, 3):
                assert neighbors(g, n, "r1") <= neighbors_h(g, n, {"r1"}, h)

    def test_h_hops_grow_with_h(self):
        """h 增大时可达集合只增不减"""
        rng = random.Random(29)
        for _ in range(20):
            g = _random_graph(rng, rng.randint(2, 30), rng.randint(5, 90))
            allowed = set(rng.sample(["r0", "r1", "r2"], rng.randint(1, 3)))
            for n in sorted(g.nodes):
                previous = neighbors_h(g, n, allowed, 1)
                for h in range(2, 6):
                    current = neighbors_h(g, n, allowed, h)
                    assert previous <= current
                    previous = current

    def test_degree_counts_both_directions(self, movie_kg: GraphKB):
        # 两条 ActorsIn 入边 + 一条 HasGenre 出边
        assert movie_kg.degree("Quantum of Solace") == 3


# =============================================================================
# 实体词表
# =============================================================================


class TestEntityLexicon:
    def test_graph_lexicon_min_length(self):
        g = GraphKB.from_triples([("Up", "HasGenre", "animation"), ("Alien", "HasGenre", "horror")])
        lex = EntityLexicon.from_graph(g)
        assert lex.lookup("Up") is None
        assert lex.lookup("Alien") == "Alien"
        # 区分大小写
        assert lex.lookup("alien") is None

    def test_table_lexicon_tags_attributes(self, navigation_kb: TableKB):
        lex = EntityLexicon.from_table(navigation_kb)
        assert lex.tag("Gas Station") == "type"
        assert lex.lookup("VALERO") == "Valero"
