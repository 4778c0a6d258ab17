"""End-to-end tests of the ke-dial command line."""

import json
from pathlib import Path

import pytest

from ke_dial import cli
from ke_dial.config.settings import SyntheticSpec
from ke_dial.data.io import (
    dumps_json,
    load_templates,
    save_dialogues,
    save_table_kb,
    save_templates,
    table_to_json,
    write_text,
)
from ke_dial.domain.dialogue import Speaker, Turn
from ke_dial.genpipe.synth import synth_corpus
from ke_dial.scripts import query as query_script


@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    """不读取仓库里的 .env，也不受外部 KEDIAL_* 变量影响"""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("KEDIAL_SEED", raising=False)
    monkeypatch.delenv("KEDIAL_LOG_LEVEL", raising=False)


def run_cli(capsys, *argv: str) -> tuple[int, dict]:
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else {}


@pytest.fixture
def synth_dir(tmp_path, capsys) -> Path:
    out = tmp_path / "synth"
    code, report = run_cli(capsys, "synth", "--out", out, "--rows", 20, "--templates", 4)
    assert code == 0
    assert report["base"] == 20
    assert report["oov_test"] == 40
    return out


# =============================================================================
# query
# =============================================================================


def test_query_table_1(tmp_path, capsys, navigation_kb, table_1_query):
    kb = save_table_kb(navigation_kb, tmp_path / "navigation.json")
    code, report = run_cli(capsys, "query", "--kb", kb, "--sql", table_1_query)
    assert code == 0
    assert report["count"] == 3
    assert report["rows"][0] == ["gas station", "Valero", "5 miles", "91 el camino real"]


def test_query_output_is_stable(tmp_path, capsys, navigation_kb):
    kb = save_table_kb(navigation_kb, tmp_path / "navigation.json")
    cli.main(["query", "--kb", str(kb), "--sql", "SELECT poi FROM navigation"])
    first = capsys.readouterr().out
    cli.main(["query", "--kb", str(kb), "--sql", "SELECT poi FROM navigation"])
    assert capsys.readouterr().out == first
    assert first.endswith("}\n")


def test_query_graph(tmp_path, capsys, movie_kg, movie_query):
    kb = tmp_path / "kg.tsv"
    kb.write_text("".join(f"{h}\t{r}\t{t}\n" for h, r, t in sorted(movie_kg.edges)), encoding="utf-8")
    code, report = run_cli(capsys, "query", "--kb", kb, "--cypher", movie_query)
    assert code == 0
    assert report["count"] == 1
    assert report["bindings"][0]["n4"] == "Daniel Craig"


# =============================================================================
# 退出码
# =============================================================================


def test_missing_input_file(tmp_path, capsys):
    code, _ = run_cli(capsys, "query", "--kb", tmp_path / "nope.json", "--sql", "SELECT a FROM t")
    assert code == 2


def test_bad_query(tmp_path, capsys, navigation_kb):
    kb = save_table_kb(navigation_kb, tmp_path / "navigation.json")
    code, report = run_cli(capsys, "query", "--kb", kb, "--sql", "SELECT FROM navigation")
    assert code == 2
    assert report == {}


def test_sql_on_graph_kb(tmp_path, capsys):
    kb = tmp_path / "kg.tsv"
    kb.write_text("a\tr\tb\n", encoding="utf-8")
    code, _ = run_cli(capsys, "query", "--kb", kb, "--sql", "SELECT a FROM t")
    assert code == 2


def test_internal_error(tmp_path, capsys, monkeypatch, navigation_kb):
    def boom(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr(query_script, "run", boom)
    kb = save_table_kb(navigation_kb, tmp_path / "navigation.json")
    code, _ = run_cli(capsys, "query", "--kb", kb, "--sql", "SELECT poi FROM navigation")
    assert code == 1


def test_invalid_config(tmp_path, capsys, navigation_kb):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("memlm:\n  window: 0\n", encoding="utf-8")
    kb = save_table_kb(navigation_kb, tmp_path / "navigation.json")
    code, _ = run_cli(capsys, "query", "--config", cfg, "--kb", kb, "--sql", "SELECT poi FROM navigation")
    assert code == 2


# =============================================================================
# delex
# =============================================================================


def test_delex_empty_file(tmp_path, capsys, navigation_kb):
    dialogues = tmp_path / "empty.jsonl"
    dialogues.write_text("", encoding="utf-8")
    kb = save_table_kb(navigation_kb, tmp_path / "navigation.json")
    out = tmp_path / "templates.json"
    code, report = run_cli(capsys, "delex", "--dialogues", dialogues, "--kb", kb, "--out", out)
    assert code == 0
    assert report["templates"] == 0
    assert out.read_text(encoding="utf-8") == "[]\n"


def test_delex_synth_base(synth_dir, capsys):
    out = synth_dir / "delexed.json"
    args = ["delex", "--dialogues", synth_dir / "base.jsonl", "--kb", synth_dir / "kb.json"]
    args += ["--queries", synth_dir / "queries.json", "--out", out]
    code, report = run_cli(capsys, *args)
    assert code == 0
    assert report == {
        "ambiguities": 0,
        "dialogues": 20,
        "missing_queries": 0,
        "skipped_entities": 0,
        "templates": 20,
    }
    planted = {t.id: t for t in load_templates(synth_dir / "templates.json")}
    for t in load_templates(out):
        assert t.turns == planted[f"tpl-{t.id.split('-')[1]}"].turns


def test_delex_strict_missing_query(tmp_path, capsys, navigation_kb, navigation_dialogue):
    dialogues = save_dialogues([navigation_dialogue], tmp_path / "d.jsonl")
    kb = save_table_kb(navigation_kb, tmp_path / "navigation.json")
    queries = tmp_path / "q.json"
    queries.write_text("{}", encoding="utf-8")
    args = ["delex", "--dialogues", dialogues, "--kb", kb, "--queries", queries]
    code, report = run_cli(capsys, *args, "--out", tmp_path / "t.json")
    assert code == 0
    assert report["missing_queries"] == 1
    code, _ = run_cli(capsys, *args, "--out", tmp_path / "t.json", "--strict")
    assert code == 2



def test_delex_strip_api(tmp_path, capsys, camrest_kb, camrest_dialogue, camrest_query):
    """--strip-api 时模板里不再有 SYS-API / API 轮次"""
    user, system = camrest_dialogue.turns
    with_api = camrest_dialogue.with_turns(
        [
            user,
            Turn(Speaker.SYS_API, "api_call moderate east"),
            Turn(Speaker.API, "curry prince moderate east indian"),
            system,
        ]
    )
    dialogues = save_dialogues([with_api], tmp_path / "d.jsonl")
    kb = save_table_kb(camrest_kb, tmp_path / "restaurant.json")
    queries = tmp_path / "q.json"
    queries.write_text(json.dumps({"cam-1": camrest_query}), encoding="utf-8")
    args = ["delex", "--dialogues", dialogues, "--kb", kb, "--queries", queries]

    code, _ = run_cli(capsys, *args, "--out", tmp_path / "kept.json")
    assert code == 0
    (kept,) = load_templates(tmp_path / "kept.json")
    assert [t.speaker for t in kept.turns][1:3] == [Speaker.SYS_API, Speaker.API]

    code, report = run_cli(capsys, *args, "--out", tmp_path / "stripped.json", "--strip-api")
    assert code == 0
    assert report["templates"] == 1
    (stripped,) = load_templates(tmp_path / "stripped.json")
    assert [t.speaker for t in stripped.turns] == [Speaker.USR, Speaker.SYS]
    assert stripped.turns[1].text.startswith("[name_0] is a [price_0]ly priced")


# =============================================================================
# generate -> memlm -> score
# =============================================================================


def test_generate_then_memlm_recalls_oov(synth_dir, capsys):
    ke = synth_dir / "ke.jsonl"
    args = ["generate", "--templates", synth_dir / "templates.json", "--kb", synth_dir / "kb.json"]
    code, report = run_cli(capsys, *args, "--out", ke)
    assert code == 0
    assert report["mode"] == "TABLE_BATCH"
    assert report["dialogues"] == 4 * 20

    model = synth_dir / "model.bin"
    code, report = run_cli(
        capsys, "memlm", "train", "--corpus", synth_dir / "base.jsonl", ke, "--out", model
    )
    assert code == 0
    assert report["dialogues"] == 20 + 80

    code, report = run_cli(
        capsys, "memlm", "eval", "--model", model, "--test", synth_dir / "oov_test.jsonl"
    )
    assert code == 0
    assert report["response_acc"] == 1.0
    assert report["dialogue_acc"] == 1.0


def test_memlm_base_only_misses_oov(synth_dir, capsys):
    model = synth_dir / "base.bin"
    run_cli(capsys, "memlm", "train", "--corpus", synth_dir / "base.jsonl", "--out", model)
    args = ["memlm", "eval", "--model", model, "--test", synth_dir / "oov_test.jsonl"]
    code, report = run_cli(capsys, *args, "--kb", synth_dir / "kb.json")
    assert code == 0
    assert report["entity_acc"] == 0.0
    assert report["dialogue_acc"] == 0.0


def test_generate_per_kb(tmp_path, capsys, navigation_kb):
    corpus = synth_corpus(SyntheticSpec(n_rows=10, n_templates=2))
    templates = save_templates(corpus.templates, tmp_path / "templates.json")
    kbs = tmp_path / "kbs.json"
    write_text(kbs, dumps_json({"s1": table_to_json(corpus.kb), "s2": table_to_json(navigation_kb)}))
    out = tmp_path / "per_kb"
    code, report = run_cli(capsys, "generate", "--templates", templates, "--kb", kbs, "--out", out)
    assert code == 0
    assert report["mode"] == "TABLE_PER_KB"
    assert report["samples"]["s1"]["dialogues"] == 2 * 10
    assert "error" in report["samples"]["s2"]
    assert (out / "s1.jsonl").exists()


def test_generate_graph(tmp_path, capsys):
    out = tmp_path / "synth"
    code, _ = run_cli(capsys, "synth", "--out", out, "--rows", 10, "--templates", 6, "--graph-nodes", 60)
    assert code == 0
    ke = out / "graph_ke.jsonl"
    args = ["generate", "--templates", out / "graph_templates.json", "--kb", out / "graph.tsv"]
    args += ["--out", ke, "--iterations", 2, "--templates-per-iteration", 10]
    code, report = run_cli(capsys, *args)
    assert code == 0
    assert report["mode"] == "GRAPH_ITERATIVE"
    assert len(report["iterations"]) == 3
    assert (out / "graph_ke.zhistory.csv").exists()


def test_generate_rejects_bad_options(synth_dir, capsys):
    args = ["generate", "--templates", synth_dir / "templates.json", "--kb", synth_dir / "kb.json"]
    code, _ = run_cli(capsys, *args, "--out", synth_dir / "x.jsonl", "--result-cap", 0)
    assert code == 2


def test_score_identical_files(synth_dir, capsys):
    test = synth_dir / "test.jsonl"
    code, report = run_cli(capsys, "score", "--pred", test, "--gold", test, "--metrics", "bleu,babi")
    assert code == 0
    assert report["bleu"] == 1.0
    assert report["response_accuracy"] == 1.0


def test_score_f1_with_kb(synth_dir, capsys):
    test = synth_dir / "test.jsonl"
    args = ["score", "--pred", test, "--gold", test, "--kb", synth_dir / "kb.json"]
    code, report = run_cli(capsys, *args, "--metrics", "f1")
    assert code == 0
    assert report["entity_f1"] == 1.0


def test_score_unknown_metric(synth_dir, capsys):
    test = synth_dir / "test.jsonl"
    code, _ = run_cli(capsys, "score", "--pred", test, "--gold", test, "--metrics", "rouge")
    assert code == 2
