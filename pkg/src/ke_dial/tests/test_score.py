"""Tests for entity F1, BLEU, bAbI accuracy, inform/success and graph precision."""

import random

import pytest

from ke_dial.domain.dialogue import Dialogue, Speaker, Turn
from ke_dial.domain.errors import AlignmentError, EmptyCorpus, ValidationError
from ke_dial.domain.graph import GraphKB
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.domain.table import TableKB
from ke_dial.score.graph import gold_entities, graph_precision_2hop
from ke_dial.score.inform import Goal, inform_success, score_dialogue
from ke_dial.score.metrics import babi_accuracy, bleu, entity_f1, format_babi
from ke_dial.score.report import ScoreInputs, score_corpus


def _dialogue(did: str, *system: str, domain: str | None = None) -> Dialogue:
    turns = []
    for i, text in enumerate(system):
        turns.append(Turn(Speaker.USR, f"user turn {i}"))
        turns.append(Turn(Speaker.SYS, text))
    return Dialogue(did, tuple(turns), domain)


# =============================================================================
# Entity F1
# =============================================================================


class TestEntityF1:
    LEXICON = EntityLexicon({"alpha": "e", "beta": "e", "gamma": "e"})

    def test_half_overlap(self):
        assert entity_f1(["alpha and beta"], ["beta and gamma"], self.LEXICON) == (0.5, 0.5, 0.5)

    def test_symmetric_f1(self):
        p = ["alpha", "alpha beta gamma", "nothing"]
        g = ["alpha beta", "gamma", "beta"]
        assert entity_f1(p, g, self.LEXICON)[2] == pytest.approx(entity_f1(g, p, self.LEXICON)[2])

    def test_no_entities(self):
        assert entity_f1(["hello"], ["world"], self.LEXICON) == (0.0, 0.0, 0.0)

    def test_misaligned(self):
        with pytest.raises(AlignmentError):
            entity_f1(["alpha"], [], self.LEXICON)

    def test_random_sets_match_counting(self):
        rng = random.Random(19)
        names = [f"ent{i}" for i in range(8)]
        lexicon = EntityLexicon({n: "e" for n in names})
        for _ in range(100):
            pred_sets = [set(rng.sample(names, rng.randint(0, 4))) for _ in range(5)]
            gold_sets = [set(rng.sample(names, rng.randint(0, 4))) for _ in range(5)]
            pred = [" ".join(["say", *sorted(s)]) for s in pred_sets]
            gold = [" ".join(["say", *sorted(s)]) for s in gold_sets]
            tp = sum(len(p & g) for p, g in zip(pred_sets, gold_sets))
            fp = sum(len(p - g) for p, g in zip(pred_sets, gold_sets))
            fn = sum(len(g - p) for p, g in zip(pred_sets, gold_sets))
            precision = tp / (tp + fp) if tp + fp else 0.0
            recall = tp / (tp + fn) if tp + fn else 0.0
            got = entity_f1(pred, gold, lexicon)
            assert got[0] == pytest.approx(precision)
            assert got[1] == pytest.approx(recall)
            if tp:
                assert got[2] == pytest.approx(2 * precision * recall / (precision + recall))
            else:
                assert got[2] == 0.0


# =============================================================================
# BLEU
# =============================================================================


class TestBleu:
    def test_identical_corpus(self):
        refs = ["the westin is located at 329 el camino real", "you are welcome"]
        assert bleu(refs, refs) == pytest.approx(1.0, abs=1e-9)

    def test_short_hypotheses_use_lower_order(self):
        assert bleu(["ok"], ["ok"]) == pytest.approx(1.0, abs=1e-9)

    def test_identical_corpus_with_mixed_lengths(self):
        """短于 4 个 token 的句子不拉低高阶精度"""
        refs = ["ok", "thank you", "you are welcome", "valero is 5 miles away at 91 el camino real"]
        assert bleu(refs, refs) == 1.0

    def test_brevity_penalty(self):
        score = bleu(["the westin is located"], ["the westin is located at 329 el camino real"])
        assert 0.0 < score < 0.5

    def test_disjoint(self):
        assert bleu(["a b c d"], ["e f g h"]) < 1e-6

    def test_partial_overlap_in_range(self):
        score = bleu(["the cat sat on the mat"], ["the cat is on the mat"])
        assert 0.0 < score < 1.0

    def test_errors(self):
        with pytest.raises(EmptyCorpus):
            bleu([], [])
        with pytest.raises(AlignmentError):
            bleu(["a"], ["a", "b"])


# =============================================================================
# bAbI 准确率
# =============================================================================


class TestBabiAccuracy:
    def test_one_wrong_response(self):
        gold = [f"response {i}" for i in range(55)]
        pred = list(gold)
        pred[52] = "something else"
        boundaries = [5] * 9 + [10]
        response_acc, dialogue_acc = babi_accuracy(pred, gold, boundaries)
        assert response_acc == pytest.approx(54 / 55)
        assert dialogue_acc == pytest.approx(9 / 10)

    def test_whitespace_is_normalized(self):
        assert babi_accuracy(["a  b "], ["a b"], [1]) == (1.0, 1.0)

    def test_boundaries_must_cover_responses(self):
        with pytest.raises(AlignmentError):
            babi_accuracy(["a", "b"], ["a", "b"], [1])

    def test_empty(self):
        with pytest.raises(EmptyCorpus):
            babi_accuracy([], [], [])

    def test_format(self):
        assert format_babi(0.9999, 0.999) == "99.99 (99.90)"


# =============================================================================
# Inform / Success
# =============================================================================


class TestInformSuccess:
    GOAL = Goal({"area": "east", "food": "indian"}, ("phone",))

    def test_inform_without_request(self, camrest_kb: TableKB):
        d = _dialogue("c1", "curry prince is a nice place")
        assert score_dialogue(d, self.GOAL, camrest_kb) == (True, False)

    def test_success(self, camrest_kb: TableKB):
        d = _dialogue("c2", "try Curry Prince", "their phone is 01223566388")
        assert score_dialogue(d, self.GOAL, camrest_kb) == (True, True)

    def test_request_from_another_row_does_not_count(self, camrest_kb: TableKB):
        d = _dialogue("c3", "try curry prince", "the phone is 01223244955")
        assert score_dialogue(d, self.GOAL, camrest_kb) == (True, False)

    def test_wrong_restaurant(self, camrest_kb: TableKB):
        d = _dialogue("c4", "pizza hut city centre is good", "phone 01223323737")
        assert score_dialogue(d, self.GOAL, camrest_kb) == (False, False)

    def test_word_boundaries(self, camrest_kb: TableKB):
        d = _dialogue("c5", "curry princes everywhere")
        assert score_dialogue(d, self.GOAL, camrest_kb) == (False, False)

    def test_rates(self, camrest_kb: TableKB):
        dialogues = [
            _dialogue("c1", "curry prince is a nice place"),
            _dialogue("c2", "rajmahal , phone 01223244955"),
            _dialogue("c3", "no idea"),
            _dialogue("c4", "the golden house"),
        ]
        assert inform_success(dialogues, [self.GOAL] * 4, camrest_kb) == (0.5, 0.25)

    def test_misaligned_goals(self, camrest_kb: TableKB):
        with pytest.raises(AlignmentError):
            inform_success([_dialogue("c1", "hi")], [], camrest_kb)

    def test_success_never_exceeds_inform(self, camrest_kb: TableKB):
        rng = random.Random(37)
        values = [v for row in camrest_kb.rows for v in row]
        dialogues, goals = [], []
        for i in range(200):
            dialogues.append(_dialogue(f"r{i}", " , ".join(rng.sample(values, rng.randint(1, 6)))))
            attr = rng.choice(["area", "food", "price"])
            goals.append(Goal({attr: camrest_kb.row_dict(rng.randrange(4))[attr]}, ("phone",)))
        inform, success = inform_success(dialogues, goals, camrest_kb)
        assert success <= inform


# =============================================================================
# 图 2-hop 精确率
# =============================================================================


class TestGraphPrecision:
    def test_gold_includes_user_entity(self, movie_kg: GraphKB, movie_lexicon: EntityLexicon):
        gold = gold_entities("I like Daniel Craig", movie_kg, movie_lexicon)
        assert gold == {
            "Daniel Craig",
            "Quantum of Solace",
            "The Girl with the Dragon Tattoo",
            "thriller",
        }

    def test_precision_and_oov(self, movie_kg: GraphKB, movie_lexicon: EntityLexicon):
        pred = ["try Quantum of Solace or Gangs of New York"]
        users = ["I like Daniel Craig"]
        precision, oov = graph_precision_2hop(
            pred, users, movie_kg, movie_lexicon, {"Quantum of Solace"}
        )
        assert precision == 0.5
        assert oov == 0.0

    def test_entity_outside_graph(self, movie_kg: GraphKB, movie_lexicon: EntityLexicon):
        lexicon = EntityLexicon({**movie_lexicon.entries, "Blade Runner": "node"}, 5, True)
        precision, _ = graph_precision_2hop(
            ["Blade Runner"], ["I like Daniel Craig"], movie_kg, lexicon, set()
        )
        assert precision == 0.0

    def test_no_predicted_entities(self, movie_kg: GraphKB, movie_lexicon: EntityLexicon):
        assert graph_precision_2hop(["hmm"], ["hi"], movie_kg, movie_lexicon, set()) == (0.0, 0.0)


# =============================================================================
# 评测报告
# =============================================================================


class TestScoreCorpus:
    def test_per_domain_breakdown(self):
        gold = [
            _dialogue("a", "the restaurant is open today", domain="restaurant"),
            _dialogue("b", "your hotel is booked for two nights", domain="hotel"),
        ]
        pred = [
            _dialogue("b", "your hotel is booked for two nights"),
            _dialogue("a", "the bar is closed"),
        ]
        report = score_corpus(pred, gold, ["bleu", "babi"])
        assert report.response_accuracy == 0.5
        assert sorted(report.per_domain) == ["hotel", "restaurant"]
        assert report.per_domain["hotel"].bleu == pytest.approx(1.0)
        assert report.per_domain["restaurant"].dialogue_accuracy == 0.0
        data = report.to_dict()
        assert "entity_f1" not in data
        assert set(data["per_domain"]) == {"hotel", "restaurant"}
        assert list(report.to_frame().index) == ["all", "hotel", "restaurant"]

    def test_f1_with_lexicon(self, camrest_kb: TableKB):
        gold = [_dialogue("a", "curry prince is in the east")]
        pred = [_dialogue("a", "rajmahal is in the east")]
        inputs = ScoreInputs(lexicon=EntityLexicon.from_table(camrest_kb))
        report = score_corpus(pred, gold, ["f1"], inputs)
        assert report.entity_f1 == pytest.approx(0.5)

    def test_api_turns_are_not_counted(self, camrest_kb: TableKB):
        """标准对话带 API 轮次、预测不带时照常对齐，API 结果里的实体不计入 F1"""
        gold = [
            Dialogue(
                "a",
                (
                    Turn(Speaker.USR, "anything in the east ?"),
                    Turn(Speaker.SYS_API, "api_call east"),
                    Turn(Speaker.API, "rajmahal east moderate"),
                    Turn(Speaker.SYS, "curry prince is in the east"),
                ),
            )
        ]
        pred = [_dialogue("a", "curry prince is in the east")]
        inputs = ScoreInputs(lexicon=EntityLexicon.from_table(camrest_kb))
        report = score_corpus(pred, gold, ["f1", "bleu"], inputs)
        assert report.entity_f1 == pytest.approx(1.0)
        assert report.bleu == 1.0

    def test_inform_through_report(self, camrest_kb: TableKB):
        gold = [_dialogue("a", "x")]
        pred = [_dialogue("a", "curry prince , 01223566388")]
        inputs = ScoreInputs(table=camrest_kb, goals={"a": TestInformSuccess.GOAL})
        report = score_corpus(pred, gold, ["inform"], inputs)
        assert (report.inform, report.success) == (1.0, 1.0)

    def test_unknown_metric(self):
        d = [_dialogue("a", "hello")]
        with pytest.raises(ValidationError):
            score_corpus(d, d, ["rouge"])

    def test_missing_resources(self):
        d = [_dialogue("a", "hello")]
        with pytest.raises(ValidationError):
            score_corpus(d, d, ["f1"])
        with pytest.raises(ValidationError):
            score_corpus(d, d, ["inform"])
        with pytest.raises(ValidationError):
            score_corpus(d, d, ["graph2hop"])

    def test_misaligned_ids(self):
        with pytest.raises(AlignmentError):
            score_corpus([_dialogue("a", "hello")], [_dialogue("b", "hello")], ["bleu"])

    def test_response_count_mismatch(self):
        with pytest.raises(AlignmentError):
            score_corpus([_dialogue("a", "hello")], [_dialogue("a", "hello", "again")], ["bleu"])
