"""Smoke tests for the _facte extension module."""

import json

import _facte

RULES = json.dumps(
    [
        {"kind": "consistency", "contains": "bogus", "response": "False"},
        {"kind": "consistency", "response": "True"},
        {
            "kind": "counterfactual-generation",
            "response": "Contrastive Chain After Step t:\nPERTURBED continuation here.",
        },
        {"kind": "preference", "builtin": "prefer_without", "token": "PERTURBED"},
    ]
)


def make_gateway():
    return _facte.JudgeGateway(backend="scripted", rules_json=RULES, seed=7)


def test_score_candidate_full_marks():
    q = _facte.Question("q1", "What is three times four?", gold_answer="12")
    cand = _facte.Candidate("good", ["Multiply 3 by 4.", "The product is 12."], "12")
    report = json.loads(
        _facte.score_candidate(q, cand, _facte.EstimationConfig(seed=7), make_gateway())
    )
    assert report["C"]["C"] == 1.0
    assert report["F"]["F"] == 1.0
    assert report["R"] == 1.0
    assert not report["pruned"]


def test_zero_consistency_prunes():
    q = _facte.Question("q2", "What is two plus two?")
    cand = _facte.Candidate("bad", ["Apply a bogus shortcut.", "Conclude 5."], "5")
    gw = make_gateway()
    report = json.loads(
        _facte.score_candidate(q, cand, _facte.EstimationConfig(seed=7), gw)
    )
    assert report["R"] == 0.0
    assert report["pruned"]
    ledger = json.loads(gw.ledger())
    assert ledger["generation"] == 0  # faithfulness never ran


def test_select_best_prefers_sound_chain():
    q = _facte.Question("q3", "What is five plus five?", gold_answer="10")
    pool = [
        _facte.Candidate("wrong", ["Apply a bogus shortcut.", "Get 11."], "11"),
        _facte.Candidate("right", ["Add 5 and 5.", "The sum is 10."], "10"),
    ]
    selection = json.loads(
        _facte.select_best(q, pool, _facte.EstimationConfig(seed=7), make_gateway())
    )
    assert selection["best"] == "right"
    assert selection["best_answer"] == "10"
    assert selection["nominal_requests_per_query"]["lightweight"] == 7


def test_answer_canonicalization():
    assert _facte.canonicalize_answer("Answer: 70,000") == "70000"
    assert _facte.answers_equal("0.5", "1/2")
    assert _facte.answers_equal("\\sqrt{51}", "sqrt(51)", task_kind="math-expression")
    assert not _facte.answers_equal("3", "4")


def test_segmentation():
    steps = _facte.segment_chain("Step 1: add.\nStep 2: carry.")
    assert steps == ["add.", "carry."]
