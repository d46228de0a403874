#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "facte/denoiser.hpp"
#include "facte/errors.hpp"

using namespace facte;

static BackendConfig scripted_config() {
    BackendConfig cfg;
    cfg.backend = BackendKind::Scripted;
    return cfg;
}

static Exemplar make_exemplar(const std::string& id, const std::string& question,
                              const std::string& label) {
    Exemplar e;
    e.question.id = id;
    e.question.text = question;
    e.question.task_kind = TaskKind::MathNumeric;
    e.question.gold_answer = canonicalize_answer(label, TaskKind::MathNumeric);
    e.chain = chain_from_steps({"work it out", "conclude"});
    e.label = canonicalize_answer(label, TaskKind::MathNumeric);
    return e;
}

static JudgeGateway graded_gateway() {
    JudgeGateway gw(scripted_config());
    gw.set_scripted_oracle(ScriptedOracle::from_json_text(R"([
        {"kind": "consistency", "contains": "goodq", "response": "True",
         "token_probs": [["True", 0.9]]},
        {"kind": "consistency", "contains": "mehq", "response": "True",
         "token_probs": [["True", 0.2]]},
        {"kind": "consistency", "contains": "badq", "response": "False"}
    ])", 0));
    return gw;
}

static PromptSet graded_set() {
    PromptSet pset;
    pset.exemplars = {make_exemplar("e1", "goodq: what is 1?", "1"),
                      make_exemplar("e2", "mehq: what is 2?", "2"),
                      make_exemplar("e3", "badq: what is 3?", "3")};
    return pset;
}

static DenoiseConfig denoise_config(double tau) {
    DenoiseConfig cfg;
    cfg.tau = tau;
    cfg.estimation.n_trials = 1;
    cfg.estimation.ablation = Ablation::ConsistencyOnly;
    return cfg;
}

TEST_CASE("filtering keeps R >= tau with positive C, preserving order") {
    auto gw = graded_gateway();
    // Scores: e1 R = 0.9, e2 R = 0.2, e3 R = 0 (pruned).
    auto clean = filter_prompt_set(graded_set(), denoise_config(0.5), gw);
    REQUIRE(clean.exemplars.size() == 1);
    CHECK(clean.exemplars[0].question.id == "e1");
    CHECK(clean.origin == PromptSetOrigin::Clean);
    REQUIRE(clean.exemplars[0].report);
    CHECK(clean.exemplars[0].report->R == doctest::Approx(0.9));
    CHECK(clean.exemplars[0].report->C->reference_used == "label");
}

TEST_CASE("a permissive threshold still drops zero-consistency exemplars") {
    auto gw = graded_gateway();
    auto clean = filter_prompt_set(graded_set(), denoise_config(0.0), gw);
    REQUIRE(clean.exemplars.size() == 2);
    CHECK(clean.exemplars[0].question.id == "e1");
    CHECK(clean.exemplars[1].question.id == "e2");  // order preserved
}

TEST_CASE("retention is anti-monotone in tau") {
    std::size_t prev = graded_set().exemplars.size() + 1;
    for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        auto gw = graded_gateway();
        auto clean = filter_prompt_set(graded_set(), denoise_config(tau), gw);
        CHECK(clean.exemplars.size() <= prev);
        prev = clean.exemplars.size();
    }
    CHECK(prev == 0);  // tau = 1 demands R >= 1
}

TEST_CASE("icl prompt carries one block per retained exemplar") {
    Question query;
    query.id = "t1";
    query.text = "what is 9?";
    query.task_kind = TaskKind::MathNumeric;

    auto pset = graded_set();
    const std::string p = build_icl_prompt(pset, query);
    std::size_t blocks = 0;
    for (auto pos = p.find("CoT:\n"); pos != std::string::npos;
         pos = p.find("CoT:\n", pos + 1))
        ++blocks;
    CHECK(blocks == 3);
    CHECK(p.find("goodq: what is 1?") != std::string::npos);
    CHECK(p.find("what is 9?") != std::string::npos);

    PromptSet empty;
    CHECK(build_icl_prompt(empty, query).find("without any explanation") !=
          std::string::npos);
}

TEST_CASE("answer extraction") {
    CHECK(extract_answer_text("CoT: add stuff\nAnswer: 42") == "42");
    CHECK(extract_answer_text("Answer: 1\nmore\nAnswer: 2") == "2");  // last wins
    CHECK(extract_answer_text("just a line\nfinal line") == "final line");
    CHECK(extract_answer_text("Answer:   spaced   ") == "spaced");
}

static std::vector<Question> make_testset(int n_easy, int n_hard) {
    std::vector<Question> out;
    for (int i = 0; i < n_easy + n_hard; ++i) {
        Question q;
        q.id = "t" + std::to_string(i);
        q.text = (i < n_easy ? "easy question " : "qhard question ") + std::to_string(i);
        q.task_kind = TaskKind::MathNumeric;
        q.gold_answer = canonicalize_answer("42", TaskKind::MathNumeric);
        out.push_back(q);
    }
    return out;
}

TEST_CASE("accuracy evaluation: 15 of 20 correct is 0.75") {
    JudgeGateway gw(scripted_config());
    gw.set_scripted_oracle(ScriptedOracle::from_json_text(R"([
        {"kind": "completion", "contains": "qhard", "response": "Answer: 0"},
        {"kind": "completion", "response": "Answer: 42"}
    ])", 0));
    auto metrics = evaluate_accuracy(make_testset(15, 5), graded_set(), gw);
    CHECK(metrics.n == 20);
    CHECK(metrics.acc == doctest::Approx(0.75));
    REQUIRE(metrics.items.size() == 20);
    CHECK(metrics.items[0].correct);
    CHECK_FALSE(metrics.items[19].correct);
    CHECK(gw.ledger().completion == 20);

    auto j = metrics_to_json(metrics, 3, 1, 0.5);
    CHECK(j["acc"] == doctest::Approx(0.75));
    CHECK(j["n"] == 20);
    CHECK(j["kept"] == 3);
    CHECK(j["dropped"] == 1);
    CHECK(j["tau"] == 0.5);
    CHECK(j["items"].size() == 20);
}

TEST_CASE("unextractable completions count as wrong, not fatal") {
    JudgeGateway gw(scripted_config());
    gw.set_scripted_oracle(ScriptedOracle::from_json_text(R"([
        {"kind": "completion", "response": "no number anywhere"}
    ])", 0));
    auto metrics = evaluate_accuracy(make_testset(2, 0), graded_set(), gw);
    CHECK(metrics.acc == 0.0);
    for (const auto& item : metrics.items) {
        CHECK(item.extraction_failed);
        CHECK_FALSE(item.correct);
    }
}

TEST_CASE("empty test sets are rejected") {
    JudgeGateway gw(scripted_config());
    CHECK_THROWS_AS(evaluate_accuracy({}, graded_set(), gw), EmptyTestset);
}
