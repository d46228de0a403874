#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>

#include "facte/errors.hpp"
#include "facte/gateway.hpp"

using namespace facte;

static BackendConfig scripted_config() {
    BackendConfig cfg;
    cfg.backend = BackendKind::Scripted;
    cfg.model_id = "scripted";
    return cfg;
}

static JudgeRequest make_request(RequestKind kind, const std::string& prompt) {
    JudgeRequest req;
    req.kind = kind;
    req.prompt = prompt;
    return req;
}

TEST_CASE("cache key is a pure digest of the request identity") {
    auto a = make_request(RequestKind::Consistency, "p");
    CHECK(a.cache_key("m") == a.cache_key("m"));
    CHECK(a.cache_key("m") != a.cache_key("other-model"));

    auto b = a;
    b.prompt = "p2";
    CHECK(a.cache_key("m") != b.cache_key("m"));

    auto c = a;
    c.kind = RequestKind::Preference;
    CHECK(a.cache_key("m") != c.cache_key("m"));

    auto d = a;
    d.trial_tag = "1";
    CHECK(a.cache_key("m") != d.cache_key("m"));

    auto e = a;
    e.decoding.temperature = 0.7;
    CHECK(a.cache_key("m") != e.cache_key("m"));
}

TEST_CASE("first matching rule fires; unmatched requests raise NoRuleMatched") {
    ScriptedOracle oracle;
    oracle.add_fixed(RequestKind::Consistency, "bogus", "False");
    oracle.add_fixed(RequestKind::Consistency, "", "True");

    JudgeGateway gw(scripted_config());
    gw.set_scripted_oracle(oracle);

    CHECK(gw.submit(make_request(RequestKind::Consistency, "a bogus chain")).text ==
          "False");
    CHECK(gw.submit(make_request(RequestKind::Consistency, "a sound chain")).text ==
          "True");
    CHECK_THROWS_AS(gw.submit(make_request(RequestKind::Preference, "anything")),
                    NoRuleMatched);
}

TEST_CASE("identical requests coalesce through the in-memory cache") {
    ScriptedOracle oracle;
    oracle.add_fixed(std::nullopt, "", "True");
    JudgeGateway gw(scripted_config());
    gw.set_scripted_oracle(oracle);

    auto req = make_request(RequestKind::Consistency, "same prompt");
    auto first = gw.submit(req);
    auto second = gw.submit(req);
    CHECK(first.origin == ResponseOrigin::Scripted);
    CHECK(second.origin == ResponseOrigin::Cache);
    CHECK(second.text == first.text);

    auto ledger = gw.ledger();
    CHECK(ledger.consistency == 2);  // logical submissions both count
    CHECK(ledger.scripted == 1);
    CHECK(ledger.cache_hits == 1);
    CHECK(ledger.network == 0);

    // The transcript holds exactly one entry per cache key.
    auto transcript = gw.transcript();
    REQUIRE(transcript.size() == 1);
    CHECK(transcript[0].cache_key == first.cache_key);
    CHECK(transcript[0].response == "True");
}

TEST_CASE("trial tags keep repeated hot trials distinct") {
    ScriptedOracle oracle;
    oracle.add_fixed(std::nullopt, "", "True");
    JudgeGateway gw(scripted_config());
    gw.set_scripted_oracle(oracle);

    auto req = make_request(RequestKind::Consistency, "same prompt");
    req.decoding.temperature = 0.7;
    req.trial_tag = "0";
    auto a = gw.submit(req);
    req.trial_tag = "1";
    auto b = gw.submit(req);
    CHECK(a.cache_key != b.cache_key);
    CHECK(gw.ledger().scripted == 2);
    CHECK(gw.transcript().size() == 2);
}

TEST_CASE("cache file round-trips across gateway instances") {
    const std::string path = "gateway_cache_test.jsonl";
    std::remove(path.c_str());

    auto req = make_request(RequestKind::Preference, "Option A:\nx\n\nOption B:\ny\n\nAnswer Choice:");
    std::string key;
    {
        ScriptedOracle oracle;
        oracle.add_fixed(std::nullopt, "", "A");
        JudgeGateway gw(scripted_config());
        gw.set_scripted_oracle(oracle);
        gw.attach_cache_file(path);
        key = gw.submit(req).cache_key;
        CHECK(gw.ledger().scripted == 1);
    }
    {
        // No oracle at all: every response must come from the warm cache.
        JudgeGateway gw(scripted_config());
        gw.attach_cache_file(path);
        auto resp = gw.submit(req);
        CHECK(resp.origin == ResponseOrigin::Cache);
        CHECK(resp.text == "A");
        CHECK(resp.cache_key == key);
        CHECK(gw.ledger().scripted == 0);
        CHECK(gw.ledger().cache_hits == 1);
    }
    std::remove(path.c_str());
}

TEST_CASE("scripted builtins load from JSON") {
    const char* rules = R"([
        {"kind": "consistency", "contains": "bogus", "response": "False"},
        {"kind": "consistency", "builtin": "fixed", "response": "True",
         "token_probs": [["True", 0.9]]},
        {"kind": "preference", "builtin": "prefer_without", "token": "PERTURBED"},
        {"builtin": "always", "choice": "NA"}
    ])";
    auto oracle = ScriptedOracle::from_json_text(rules, 1);
    JudgeGateway gw(scripted_config());
    gw.set_scripted_oracle(oracle);

    auto good = gw.submit(make_request(RequestKind::Consistency, "clean"));
    CHECK(good.text == "True");
    REQUIRE(good.token_probs.has_value());
    CHECK(good.token_probs->at(0).first == "True");
    CHECK(good.token_probs->at(0).second == doctest::Approx(0.9));

    CHECK(gw.submit(make_request(RequestKind::Consistency, "bogus step")).text ==
          "False");

    const std::string pref =
        "Option A:\nprefix,orig\n\nOption B:\nprefix,PERTURBED\n\nAnswer Choice: [A/B/NA]";
    CHECK(gw.submit(make_request(RequestKind::Preference, pref)).text == "A");

    const std::string pref_b =
        "Option A:\nprefix,PERTURBED\n\nOption B:\nprefix,orig\n\nAnswer Choice: [A/B/NA]";
    CHECK(gw.submit(make_request(RequestKind::Preference, pref_b)).text == "B");

    const std::string pref_both =
        "Option A:\nPERTURBED\n\nOption B:\nPERTURBED\n\nAnswer Choice: [A/B/NA]";
    CHECK(gw.submit(make_request(RequestKind::Preference, pref_both)).text == "NA");

    CHECK(gw.submit(make_request(RequestKind::Completion, "whatever")).text == "NA");

    CHECK_THROWS_AS(ScriptedOracle::from_json_text(R"([{"builtin": "nope"}])", 0),
                    ConfigError);
    CHECK_THROWS_AS(ScriptedOracle::from_json_text(R"({"not": "array"})", 0), ConfigError);
}

TEST_CASE("coin builtin is deterministic per cache key") {
    auto oracle = ScriptedOracle::from_json_text(R"([{"builtin": "coin"}])", 42);
    JudgeGateway gw1(scripted_config());
    gw1.set_scripted_oracle(oracle);
    JudgeGateway gw2(scripted_config());
    gw2.set_scripted_oracle(oracle);

    int heads = 0;
    for (int i = 0; i < 200; ++i) {
        auto req = make_request(RequestKind::Preference, "p" + std::to_string(i));
        auto a = gw1.submit(req);
        auto b = gw2.submit(req);
        CHECK(a.text == b.text);  // same key, same draw
        heads += a.text == "A";
    }
    CHECK(heads > 60);
    CHECK(heads < 140);
}

TEST_CASE("verdict_table builtin indexes by trial tag") {
    auto oracle = ScriptedOracle::from_json_text(
        R"([{"builtin": "verdict_table",
             "table": [["True", 0.9], ["False", 0.6], ["True", 0.8]]}])",
        0);
    JudgeGateway gw(scripted_config());
    gw.set_scripted_oracle(oracle);
    auto req = make_request(RequestKind::Consistency, "p");
    req.decoding.temperature = 0.7;
    req.trial_tag = "0";
    CHECK(gw.submit(req).text == "True");
    req.trial_tag = "1";
    CHECK(gw.submit(req).text == "False");
    req.trial_tag = "2";
    auto third = gw.submit(req);
    CHECK(third.text == "True");
    REQUIRE(third.token_probs.has_value());
    CHECK(third.token_probs->at(0).second == doctest::Approx(0.8));
}

TEST_CASE("preference option extraction rejects non-preference prompts") {
    CHECK_THROWS_AS(extract_preference_options("not a preference prompt"),
                    MalformedResponse);
    auto [a, b] = extract_preference_options(
        "Option A:\nfirst\n\nOption B:\nsecond\n\nAnswer Choice: [A/B/NA]");
    CHECK(a.find("first") != std::string::npos);
    CHECK(b.find("second") != std::string::npos);
}

TEST_CASE("backend config validation") {
    BackendConfig cfg;
    cfg.backend = BackendKind::Wire;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);  // missing endpoint
    cfg.endpoint_url = "http://localhost:1";
    cfg.concurrency_limit = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.concurrency_limit = 2;
    cfg.max_retries = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.max_retries = 0;
    CHECK_NOTHROW(cfg.validate());
}
