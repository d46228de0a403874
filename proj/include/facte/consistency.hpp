#pragma once

#include <string>
#include <vector>

#include "facte/chain.hpp"
#include "facte/config.hpp"
#include "facte/gateway.hpp"

namespace facte {

enum class ProbMode { TokenProb, Unit };

std::string to_string(ProbMode m);

struct ConsistencyTrial {
    int trial_index = 1;  // 1..N
    bool verdict = false;
    double prob = 0.0;  // extracted P(J=1); contributes only when verdict=true
    bool flagged = false;  // judge noncompliance (no True/False token)
    std::string transcript_key;
};

struct ConsistencyScore {
    double value = 0.0;  // (1/N) * sum prob_n * [verdict_n]
    std::vector<ConsistencyTrial> trials;
    int n_trials = 0;
    ProbMode prob_mode = ProbMode::Unit;
    std::string reference_used;  // "gold" or "candidate"
};

struct VerdictParse {
    bool verdict = false;
    double prob = 0.0;
    bool flagged = false;  // neither True nor False appeared
    bool token_prob_used = false;
};

/// Extracts the first word-bounded True/False verdict and its probability.
/// When token probabilities are present, P is the verdict token's mass
/// normalized over {True, False}; otherwise P = 1 for the emitted verdict.
VerdictParse parse_verdict(const JudgeResponse& resp);

/// N repeated judgments of whether the chain deduces the reference answer.
ConsistencyScore estimate_consistency(const Question& q, const ReasoningChain& chain,
                                      const AnswerValue& reference,
                                      const std::string& reference_used,
                                      const EstimationConfig& cfg, JudgeGateway& gateway);

}  // namespace facte
