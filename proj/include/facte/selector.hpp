#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "facte/chain.hpp"
#include "facte/config.hpp"
#include "facte/consistency.hpp"
#include "facte/faithfulness.hpp"
#include "facte/gateway.hpp"

namespace facte {

/// Per-candidate tandem score: R = C * F, with the evidence behind both
/// factors and the judge-request ledger delta attributable to this candidate.
struct ScoreReport {
    std::string candidate_id;
    AnswerValue answer;
    std::optional<ConsistencyScore> C;
    std::optional<FaithfulnessScore> F;
    double R = 0.0;
    bool pruned = false;  // C = 0 short-circuit: no faithfulness requests
    std::vector<std::string> flags;
    RequestLedger ledger;
    std::string error;  // non-empty when scoring this candidate failed

    bool has_flags() const;
};

struct SelectionResult {
    std::optional<std::string> best;
    std::optional<AnswerValue> best_answer;
    double R_max = 0.0;
    std::vector<ScoreReport> ranking;  // sorted best-first
    bool fallback_used = false;
};

/// Logical judge-request counts predicted by the accounting model, next to
/// the nominal per-query figures (lightweight 7; standard 3*L+1).
struct AccountingModel {
    std::int64_t consistency = 0;
    std::int64_t generation = 0;
    std::int64_t preference = 0;
    std::int64_t nominal = 0;
};

AccountingModel expected_counts(FaithMode mode, int n_trials, int chain_length,
                                PerturbationPolicy policy, Ablation ablation,
                                bool pruned);

std::int64_t nominal_requests(FaithMode mode, int chain_length);

/// Scores one candidate: C first (pruning at C = 0), then F, then R = C * F.
/// `reference` overrides the consistency reference answer (denoise mode judges
/// against the label); by default selection judges the candidate's own answer.
ScoreReport score_candidate(const Question& q, const Candidate& cand,
                            const EstimationConfig& cfg, JudgeGateway& gateway,
                            const AnswerValue* reference = nullptr);

/// Argmax over R among non-pruned candidates. Ties: higher C, then unflagged,
/// then lowest candidate ordinal. All-pruned pools set fallback_used and leave
/// best empty.
SelectionResult select_best(const Question& q, const std::vector<Candidate>& candidates,
                            const EstimationConfig& cfg, JudgeGateway& gateway);

nlohmann::json consistency_to_json(const ConsistencyScore& c);
nlohmann::json faithfulness_to_json(const FaithfulnessScore& f);
nlohmann::json ledger_to_json(const RequestLedger& ledger);
nlohmann::json report_to_json(const ScoreReport& report);
/// `pool` (when given) lets the record embed the winning chain so downstream
/// ICL jobs can rebuild exemplars from the report alone.
nlohmann::json selection_to_json(const Question& q, const SelectionResult& result,
                                 const EstimationConfig& cfg,
                                 const std::vector<Candidate>* pool = nullptr,
                                 bool include_ranking = true);

}  // namespace facte
