import os

import pytest

import _codeeq as ce

CORPUS = os.path.join(os.environ.get("CODEEQ_DATA_DIR", "data"),
                      "mini_corpus.jsonl")


def test_canonicalize():
    assert ce.canonicalize("if a: print(a)\n") == "if a:\n    print(a)\n"
    assert ce.canonicalize("x=1;y=2") == "x = 1\ny = 2\n"
    with pytest.raises(Exception):
        ce.canonicalize("x = (")


def test_transform_kinds_listed():
    assert len(ce.transform_kinds) == 7
    assert "for_while_swap" in ce.transform_kinds


def test_apply_transform():
    out = ce.apply_transform("for i in range(10):\n    print(i)\n",
                             "for_while_swap", "sp", seed=0)
    assert out["ok"]
    assert out["source"] == "i = 0\nwhile i < 10:\n    print(i)\n    i += 1\n"

    miss = ce.apply_transform("print(1)\n", "for_while_swap", "sp")
    assert not miss["ok"]
    assert "reason" in miss

    with pytest.raises(ValueError):
        ce.apply_transform("x = 1\n", "nonsense", "sp")


def test_run_program():
    out = ce.run_program("n = int(input())\nprint(n * 2)\n", "21\n")
    assert out["status"] == "completed"
    assert out["stdout"] == "42\n"

    boom = ce.run_program("print(1 // 0)\n")
    assert boom["status"] == "runtime_error"
    assert boom["error"] == "division by zero"

    spin = ce.run_program("while True:\n    x = 1\n", "", 1000)
    assert spin["status"] == "step_budget_exceeded"


def test_ingest_summary():
    out = ce.ingest_summary(CORPUS)
    assert len(out["clusters"]) == 12
    row = out["clusters"][0]
    assert row["correct"] == 4
    assert row["incorrect"] == 2
    assert row["tests"] >= 5


def test_generate_and_evaluate():
    quotas = {"id": (2, 2), "fe": (2, 2), "ne": (2, 2), "di": (2, 2)}
    out = ce.generate(CORPUS, quotas, seed=3, jobs=2)
    assert out["count"] == 16
    lines = out["perturbed_jsonl"].strip().split("\n")
    assert len(lines) == 16
    assert len(out["originals_jsonl"].strip().split("\n")) == 16
    assert "per_kind" in out["stats_json"]

    again = ce.generate(CORPUS, quotas, seed=3, jobs=1)
    assert again["perturbed_jsonl"] == out["perturbed_jsonl"]

    scored = ce.evaluate_dataset(CORPUS, out["perturbed_jsonl"],
                                 judge="oracle", style="basic")
    assert scored["perturbed_acc"] == 1.0
    assert scored["original_acc"] == 1.0

    baseline = ce.evaluate_dataset(CORPUS, out["perturbed_jsonl"],
                                   judge="constant-no", style="basic")
    assert baseline["perturbed_acc"] == 0.75


def test_prompts_and_verdicts():
    prompt = ce.build_prompt("basic", "print(1)", "print(2)")
    assert "Program 1: print(1)\nProgram 2: print(2)" in prompt
    assert "{prog1}" not in prompt
    cot = ce.build_prompt("cot", "a", "b")
    assert "FINAL_ANSWER_IS_YES" in cot

    assert ce.parse_verdict("basic", " Yes ") == "yes"
    assert ce.parse_verdict("basic", "maybe") == "unparseable"
    assert ce.parse_verdict(
        "cot", "FINAL_ANSWER_IS_YES\nFINAL_ANSWER_IS_NO") == "no"
