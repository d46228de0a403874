#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "facte/rng.hpp"

namespace facte {

enum class RequestKind { Consistency, CounterfactualGeneration, Preference, Completion };

std::string to_string(RequestKind k);
RequestKind request_kind_from_string(const std::string& s);

struct Decoding {
    double temperature = 0.0;
    int max_tokens = 1024;
    bool want_token_probs = false;
};

/// One interaction with a judge backend. trial_tag is empty except for
/// independent repeated trials at temperature > 0, where it keeps the cache
/// from collapsing them into one call.
struct JudgeRequest {
    RequestKind kind = RequestKind::Consistency;
    std::string prompt;
    Decoding decoding;
    std::string trial_tag;

    /// Digest of (kind, prompt, model_id, decoding, trial_tag); pure.
    std::string cache_key(const std::string& model_id) const;
};

enum class ResponseOrigin { Network, Cache, Scripted };

std::string to_string(ResponseOrigin o);

struct JudgeResponse {
    std::string text;
    std::optional<std::vector<std::pair<std::string, double>>> token_probs;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    ResponseOrigin origin = ResponseOrigin::Scripted;
    std::string cache_key;
};

enum class BackendKind { Wire, Scripted };

struct BackendConfig {
    BackendKind backend = BackendKind::Scripted;
    std::string endpoint_url;
    std::string model_id = "scripted";
    double temperature = 0.0;
    int request_timeout_ms = 30000;
    int max_retries = 2;
    int backoff_base_ms = 100;
    int concurrency_limit = 4;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Scripted oracle
// ---------------------------------------------------------------------------

/// Deterministic rule-driven judge stand-in. Rules are tried in order; the
/// first match fires. Unmatched requests raise NoRuleMatched.
struct ScriptedRule {
    std::optional<RequestKind> kind;
    std::function<bool(const JudgeRequest&)> matcher;  // nullptr matches all
    std::function<JudgeResponse(const JudgeRequest&, KeyedStream&)> respond;
};

class ScriptedOracle {
public:
    explicit ScriptedOracle(std::uint64_t seed = 0) : seed_(seed) {}

    void add_rule(ScriptedRule rule) { rules_.push_back(std::move(rule)); }

    /// Fixed-text rule, optionally restricted by kind and prompt substring.
    void add_fixed(std::optional<RequestKind> kind, const std::string& contains,
                   const std::string& response,
                   std::optional<std::vector<std::pair<std::string, double>>>
                       token_probs = std::nullopt);

    JudgeResponse respond(const JudgeRequest& req, const std::string& cache_key) const;

    /// Loads rules from a JSON file (array of rule objects; see README).
    static ScriptedOracle from_json_file(const std::string& path, std::uint64_t seed);
    static ScriptedOracle from_json_text(const std::string& text, std::uint64_t seed);

private:
    std::vector<ScriptedRule> rules_;
    std::uint64_t seed_;
};

/// Extracts the Option A / Option B blocks from a preference prompt.
std::pair<std::string, std::string> extract_preference_options(const std::string& prompt);

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

struct RequestLedger {
    std::int64_t consistency = 0;
    std::int64_t generation = 0;
    std::int64_t preference = 0;
    std::int64_t completion = 0;
    std::int64_t cache_hits = 0;
    std::int64_t network = 0;
    std::int64_t scripted = 0;

    std::int64_t logical_total() const {
        return consistency + generation + preference + completion;
    }
};

struct TranscriptEntry {
    std::string cache_key;
    RequestKind kind = RequestKind::Consistency;
    std::string prompt;
    std::string response;
    std::optional<std::vector<std::pair<std::string, double>>> token_probs;
    ResponseOrigin origin = ResponseOrigin::Scripted;
};

/// The single doorway to any judge. Consults the persistent cache first,
/// then the configured backend; every resolved response is recorded once in
/// the transcript, keyed by cache_key.
class JudgeGateway {
public:
    JudgeGateway(BackendConfig cfg, std::uint64_t seed = 0);
    /// Movable for factory-style construction; must not be moved while
    /// requests are in flight. The synchronization primitives start fresh.
    JudgeGateway(JudgeGateway&& other) noexcept;
    JudgeGateway& operator=(JudgeGateway&&) = delete;

    void set_scripted_oracle(ScriptedOracle oracle);
    /// Loads an existing cache file and appends new entries to it.
    void attach_cache_file(const std::string& path);
    void attach_transcript_file(const std::string& path);

    JudgeResponse submit(const JudgeRequest& req);

    const BackendConfig& config() const { return cfg_; }
    RequestLedger ledger() const;
    std::vector<TranscriptEntry> transcript() const;
    void reset_ledger();

private:
    JudgeResponse resolve(const JudgeRequest& req, const std::string& key);
    JudgeResponse wire_call(const JudgeRequest& req);
    void record(const JudgeRequest& req, const JudgeResponse& resp);

    BackendConfig cfg_;
    std::uint64_t seed_;
    std::optional<ScriptedOracle> oracle_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::set<std::string> in_flight_;
    std::map<std::string, JudgeResponse> cache_;
    std::map<std::string, TranscriptEntry> transcript_;
    std::vector<std::string> transcript_order_;
    RequestLedger ledger_;
    std::string cache_path_;
    std::string transcript_path_;
    int active_network_ = 0;
};

}  // namespace facte
