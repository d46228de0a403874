#include "facte/gateway.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "facte/errors.hpp"

namespace facte {

using nlohmann::json;

std::string to_string(RequestKind k) {
    switch (k) {
        case RequestKind::Consistency: return "consistency";
        case RequestKind::CounterfactualGeneration: return "counterfactual-generation";
        case RequestKind::Preference: return "preference";
        case RequestKind::Completion: return "completion";
    }
    return "consistency";
}

RequestKind request_kind_from_string(const std::string& s) {
    if (s == "consistency") return RequestKind::Consistency;
    if (s == "counterfactual-generation") return RequestKind::CounterfactualGeneration;
    if (s == "preference") return RequestKind::Preference;
    if (s == "completion") return RequestKind::Completion;
    throw ConfigError("unknown request kind: " + s);
}

std::string to_string(ResponseOrigin o) {
    switch (o) {
        case ResponseOrigin::Network: return "network";
        case ResponseOrigin::Cache: return "cache";
        case ResponseOrigin::Scripted: return "scripted";
    }
    return "scripted";
}

std::string JudgeRequest::cache_key(const std::string& model_id) const {
    std::string blob;
    blob += to_string(kind);
    blob += '\x1f';
    blob += prompt;
    blob += '\x1f';
    blob += model_id;
    blob += '\x1f';
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f|%d|%d", decoding.temperature,
                  decoding.max_tokens, decoding.want_token_probs ? 1 : 0);
    blob += buf;
    blob += '\x1f';
    blob += trial_tag;
    const std::uint64_t h1 = fnv1a64(blob);
    const std::uint64_t h2 = fnv1a64(blob, 0x9ae16a3b2f90404fULL);
    char out[33];
    std::snprintf(out, sizeof(out), "%016llx%016llx",
                  static_cast<unsigned long long>(h1),
                  static_cast<unsigned long long>(h2));
    return std::string(out);
}

void BackendConfig::validate() const {
    if (backend == BackendKind::Wire && endpoint_url.empty())
        throw ConfigError("wire backend requires an endpoint URL");
    if (concurrency_limit < 1) throw ConfigError("concurrency_limit must be >= 1");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (temperature < 0) throw ConfigError("temperature must be >= 0");
}

static std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Scripted oracle
// ---------------------------------------------------------------------------

std::pair<std::string, std::string> extract_preference_options(const std::string& prompt) {
    const std::string a_mark = "Option A:\n";
    const std::string b_mark = "Option B:\n";
    const std::string end_mark = "Answer Choice:";
    auto a_pos = prompt.find(a_mark);
    auto b_pos = prompt.find(b_mark);
    auto e_pos = prompt.find(end_mark);
    if (a_pos == std::string::npos || b_pos == std::string::npos ||
        e_pos == std::string::npos || !(a_pos < b_pos && b_pos < e_pos))
        throw MalformedResponse("not a preference prompt");
    std::string a = prompt.substr(a_pos + a_mark.size(), b_pos - a_pos - a_mark.size());
    std::string b = prompt.substr(b_pos + b_mark.size(), e_pos - b_pos - b_mark.size());
    return {a, b};
}

void ScriptedOracle::add_fixed(
    std::optional<RequestKind> kind, const std::string& contains,
    const std::string& response,
    std::optional<std::vector<std::pair<std::string, double>>> token_probs) {
    ScriptedRule rule;
    rule.kind = kind;
    if (!contains.empty()) {
        rule.matcher = [contains](const JudgeRequest& req) {
            return req.prompt.find(contains) != std::string::npos;
        };
    }
    rule.respond = [response, token_probs](const JudgeRequest&, KeyedStream&) {
        JudgeResponse r;
        r.text = response;
        r.token_probs = token_probs;
        return r;
    };
    add_rule(std::move(rule));
}

JudgeResponse ScriptedOracle::respond(const JudgeRequest& req,
                                      const std::string& cache_key) const {
    for (const auto& rule : rules_) {
        if (rule.kind && *rule.kind != req.kind) continue;
        if (rule.matcher && !rule.matcher(req)) continue;
        KeyedStream rng(seed_, cache_key);
        JudgeResponse resp = rule.respond(req, rng);
        resp.origin = ResponseOrigin::Scripted;
        resp.cache_key = cache_key;
        return resp;
    }
    throw NoRuleMatched("no scripted rule matches " + to_string(req.kind) + " request");
}

static ScriptedRule rule_from_json(const json& j) {
    ScriptedRule rule;
    if (j.contains("kind") && !j["kind"].is_null())
        rule.kind = request_kind_from_string(j["kind"].get<std::string>());
    if (j.contains("contains") && !j["contains"].is_null()) {
        std::string needle = j["contains"].get<std::string>();
        rule.matcher = [needle](const JudgeRequest& req) {
            return req.prompt.find(needle) != std::string::npos;
        };
    }
    const std::string builtin = j.value("builtin", "fixed");
    if (builtin == "fixed") {
        std::string response = j.at("response").get<std::string>();
        std::optional<std::vector<std::pair<std::string, double>>> probs;
        if (j.contains("token_probs") && !j["token_probs"].is_null()) {
            std::vector<std::pair<std::string, double>> tp;
            for (const auto& row : j["token_probs"])
                tp.emplace_back(row.at(0).get<std::string>(), row.at(1).get<double>());
            probs = std::move(tp);
        }
        rule.respond = [response, probs](const JudgeRequest&, KeyedStream&) {
            JudgeResponse r;
            r.text = response;
            r.token_probs = probs;
            return r;
        };
    } else if (builtin == "always") {
        std::string choice = j.at("choice").get<std::string>();
        rule.respond = [choice](const JudgeRequest&, KeyedStream&) {
            JudgeResponse r;
            r.text = choice;
            return r;
        };
    } else if (builtin == "coin") {
        rule.respond = [](const JudgeRequest&, KeyedStream& rng) {
            JudgeResponse r;
            r.text = rng.coin() ? "A" : "B";
            return r;
        };
    } else if (builtin == "prefer_without" || builtin == "prefer_with") {
        const bool want_without = builtin == "prefer_without";
        std::string token = j.at("token").get<std::string>();
        double p = j.value("p", 1.0);
        rule.respond = [token, p, want_without](const JudgeRequest& req, KeyedStream& rng) {
            auto [a, b] = extract_preference_options(req.prompt);
            bool a_has = a.find(token) != std::string::npos;
            bool b_has = b.find(token) != std::string::npos;
            JudgeResponse r;
            if (a_has == b_has) {
                r.text = "NA";
                return r;
            }
            bool pick_a = want_without ? !a_has : a_has;
            if (p < 1.0 && rng.uniform_real() >= p) pick_a = !pick_a;
            r.text = pick_a ? "A" : "B";
            return r;
        };
    } else if (builtin == "verdict_table") {
        // Per-trial verdict sequence for repeated consistency trials; the
        // trial tag indexes the table.
        std::vector<std::pair<std::string, double>> table;
        for (const auto& row : j.at("table"))
            table.emplace_back(row.at(0).get<std::string>(), row.at(1).get<double>());
        rule.respond = [table](const JudgeRequest& req, KeyedStream&) {
            std::size_t idx = 0;
            if (!req.trial_tag.empty())
                idx = static_cast<std::size_t>(std::strtoull(req.trial_tag.c_str(), nullptr, 10)) %
                      table.size();
            JudgeResponse r;
            r.text = table[idx].first;
            r.token_probs = std::vector<std::pair<std::string, double>>{
                {table[idx].first, table[idx].second}};
            return r;
        };
    } else {
        throw ConfigError("unknown scripted builtin: " + builtin);
    }
    return rule;
}

ScriptedOracle ScriptedOracle::from_json_text(const std::string& text, std::uint64_t seed) {
    json j = json::parse(text);
    if (!j.is_array()) throw ConfigError("scripted rules file must hold a JSON array");
    ScriptedOracle oracle(seed);
    for (const auto& item : j) oracle.add_rule(rule_from_json(item));
    return oracle;
}

ScriptedOracle ScriptedOracle::from_json_file(const std::string& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scripted rules file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), seed);
}

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

JudgeGateway::JudgeGateway(BackendConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), seed_(seed) {
    cfg_.validate();
}

JudgeGateway::JudgeGateway(JudgeGateway&& other) noexcept
    : cfg_(std::move(other.cfg_)),
      seed_(other.seed_),
      oracle_(std::move(other.oracle_)),
      cache_(std::move(other.cache_)),
      transcript_(std::move(other.transcript_)),
      transcript_order_(std::move(other.transcript_order_)),
      ledger_(other.ledger_),
      cache_path_(std::move(other.cache_path_)),
      transcript_path_(std::move(other.transcript_path_)) {}

void JudgeGateway::set_scripted_oracle(ScriptedOracle oracle) {
    oracle_ = std::move(oracle);
}

static json token_probs_to_json(
    const std::optional<std::vector<std::pair<std::string, double>>>& probs) {
    if (!probs) return nullptr;
    json arr = json::array();
    for (const auto& [tok, p] : *probs) arr.push_back(json::array({tok, p}));
    return arr;
}

static std::optional<std::vector<std::pair<std::string, double>>> token_probs_from_json(
    const json& j) {
    if (j.is_null()) return std::nullopt;
    std::vector<std::pair<std::string, double>> out;
    for (const auto& row : j)
        out.emplace_back(row.at(0).get<std::string>(), row.at(1).get<double>());
    return out;
}

void JudgeGateway::attach_cache_file(const std::string& path) {
    std::lock_guard<std::mutex> lock(mu_);
    cache_path_ = path;
    std::ifstream in(path);
    if (!in) return;  // created on first write
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        JudgeResponse resp;
        resp.text = j.at("response").get<std::string>();
        resp.token_probs = token_probs_from_json(j.value("token_probs", json()));
        resp.cache_key = j.at("cache_key").get<std::string>();
        resp.origin = ResponseOrigin::Cache;
        cache_[resp.cache_key] = resp;
    }
}

void JudgeGateway::attach_transcript_file(const std::string& path) {
    std::lock_guard<std::mutex> lock(mu_);
    transcript_path_ = path;
}

void JudgeGateway::record(const JudgeRequest& req, const JudgeResponse& resp) {
    // Caller holds mu_. One transcript entry per cache_key.
    if (transcript_.count(resp.cache_key)) return;
    TranscriptEntry e;
    e.cache_key = resp.cache_key;
    e.kind = req.kind;
    e.prompt = req.prompt;
    e.response = resp.text;
    e.token_probs = resp.token_probs;
    e.origin = resp.origin;
    transcript_[e.cache_key] = e;
    transcript_order_.push_back(e.cache_key);
    if (!transcript_path_.empty()) {
        std::ofstream out(transcript_path_, std::ios::app);
        json j{{"cache_key", e.cache_key},
               {"kind", to_string(e.kind)},
               {"prompt", e.prompt},
               {"response", e.response},
               {"token_probs", token_probs_to_json(e.token_probs)},
               {"origin", to_string(e.origin)},
               {"created_at", iso8601_now()}};
        out << j.dump() << "\n";
    }
}

JudgeResponse JudgeGateway::submit(const JudgeRequest& req) {
    const std::string key = req.cache_key(cfg_.model_id);
    std::unique_lock<std::mutex> lock(mu_);
    switch (req.kind) {
        case RequestKind::Consistency: ++ledger_.consistency; break;
        case RequestKind::CounterfactualGeneration: ++ledger_.generation; break;
        case RequestKind::Preference: ++ledger_.preference; break;
        case RequestKind::Completion: ++ledger_.completion; break;
    }
    for (;;) {
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            ++ledger_.cache_hits;
            JudgeResponse resp = it->second;
            resp.origin = ResponseOrigin::Cache;
            resp.cache_key = key;
            record(req, resp);
            return resp;
        }
        if (!in_flight_.count(key)) break;
        cv_.wait(lock);
    }
    in_flight_.insert(key);
    lock.unlock();

    JudgeResponse resp;
    try {
        resp = resolve(req, key);
    } catch (...) {
        lock.lock();
        in_flight_.erase(key);
        cv_.notify_all();
        throw;
    }

    lock.lock();
    resp.cache_key = key;
    cache_[key] = resp;
    if (!cache_path_.empty()) {
        std::ofstream out(cache_path_, std::ios::app);
        json j{{"cache_key", key},
               {"kind", to_string(req.kind)},
               {"prompt", req.prompt},
               {"response", resp.text},
               {"token_probs", token_probs_to_json(resp.token_probs)},
               {"created_at", iso8601_now()}};
        out << j.dump() << "\n";
    }
    record(req, resp);
    in_flight_.erase(key);
    cv_.notify_all();
    return resp;
}

JudgeResponse JudgeGateway::resolve(const JudgeRequest& req, const std::string& key) {
    if (cfg_.backend == BackendKind::Scripted) {
        if (!oracle_) throw ConfigError("scripted backend without rules");
        {
            std::lock_guard<std::mutex> lock(mu_);
            ++ledger_.scripted;
        }
        return oracle_->respond(req, key);
    }
    // Bound concurrent network calls.
    {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return active_network_ < cfg_.concurrency_limit; });
        ++active_network_;
    }
    JudgeResponse resp;
    std::exception_ptr err;
    try {
        resp = wire_call(req);
    } catch (...) {
        err = std::current_exception();
    }
    {
        std::lock_guard<std::mutex> lock(mu_);
        --active_network_;
    }
    cv_.notify_all();
    if (err) std::rethrow_exception(err);
    return resp;
}

static void split_endpoint(const std::string& url, std::string& base, std::string& path) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("bad endpoint URL: " + url);
    auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) {
        base = url;
        path.clear();
    } else {
        base = url.substr(0, slash);
        path = url.substr(slash);
        while (!path.empty() && path.back() == '/') path.pop_back();
    }
}

JudgeResponse JudgeGateway::wire_call(const JudgeRequest& req) {
    std::string base, prefix;
    split_endpoint(cfg_.endpoint_url, base, prefix);
    httplib::Client cli(base);
    cli.set_connection_timeout(0, cfg_.request_timeout_ms * 1000LL);
    cli.set_read_timeout(cfg_.request_timeout_ms / 1000, (cfg_.request_timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (const char* api_key = std::getenv("FACTE_API_KEY"))
        headers.emplace("Authorization", std::string("Bearer ") + api_key);

    json body{{"model", cfg_.model_id},
              {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
              {"temperature", req.decoding.temperature},
              {"max_tokens", req.decoding.max_tokens}};
    if (req.decoding.want_token_probs) body["logprobs"] = true;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(static_cast<long long>(cfg_.backoff_base_ms) << (attempt - 1)));
        }
        {
            std::lock_guard<std::mutex> lock(mu_);
            ++ledger_.network;
        }
        auto res = cli.Post(prefix + "/chat/completions", headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw BackendUnreachable("non-retryable HTTP " + std::to_string(res->status));
        json j;
        try {
            j = json::parse(res->body);
            JudgeResponse resp;
            resp.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
            const auto& choice = j["choices"][0];
            if (choice.contains("logprobs") && !choice["logprobs"].is_null() &&
                choice["logprobs"].contains("content")) {
                std::vector<std::pair<std::string, double>> probs;
                for (const auto& tokinfo : choice["logprobs"]["content"])
                    probs.emplace_back(tokinfo.at("token").get<std::string>(),
                                       std::exp(tokinfo.at("logprob").get<double>()));
                resp.token_probs = std::move(probs);
            }
            if (j.contains("usage")) {
                resp.prompt_tokens = j["usage"].value("prompt_tokens", 0);
                resp.completion_tokens = j["usage"].value("completion_tokens", 0);
            }
            resp.origin = ResponseOrigin::Network;
            return resp;
        } catch (const json::exception& e) {
            throw MalformedResponse(std::string("undecodable completion body: ") + e.what());
        }
    }
    throw BackendUnreachable("judge backend unreachable after " +
                             std::to_string(cfg_.max_retries + 1) + " attempts (" +
                             last_error + ")");
}

RequestLedger JudgeGateway::ledger() const {
    std::lock_guard<std::mutex> lock(mu_);
    return ledger_;
}

void JudgeGateway::reset_ledger() {
    std::lock_guard<std::mutex> lock(mu_);
    ledger_ = RequestLedger{};
}

std::vector<TranscriptEntry> JudgeGateway::transcript() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<TranscriptEntry> out;
    out.reserve(transcript_order_.size());
    for (const auto& key : transcript_order_) out.push_back(transcript_.at(key));
    return out;
}

}  // namespace facte
