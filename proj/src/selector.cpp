#include "facte/selector.hpp"

#include <algorithm>

#include "facte/errors.hpp"

namespace facte {

using nlohmann::json;

bool ScoreReport::has_flags() const {
    if (!flags.empty()) return true;
    if (F && !F->flags.empty()) return true;
    if (F) {
        for (const auto& s : F->splits)
            for (const auto& c : s.cells)
                if (!c.flags.empty()) return true;
    }
    if (C) {
        for (const auto& t : C->trials)
            if (t.flagged) return true;
    }
    return false;
}

AccountingModel expected_counts(FaithMode mode, int n_trials, int chain_length,
                                PerturbationPolicy policy, Ablation ablation,
                                bool pruned) {
    AccountingModel m;
    m.nominal = nominal_requests(mode, chain_length);
    if (ablation != Ablation::FaithfulnessOnly) m.consistency = n_trials;
    if (pruned || ablation == Ablation::ConsistencyOnly) return m;
    if (chain_length <= 1) return m;
    const std::int64_t splits = mode == FaithMode::Standard
                                    ? chain_length - 1
                                    : std::min<std::int64_t>(n_trials, chain_length - 1);
    const std::int64_t per_split = policy == PerturbationPolicy::All ? 5 : 1;
    m.generation = splits * per_split;
    m.preference = splits * per_split;
    return m;
}

std::int64_t nominal_requests(FaithMode mode, int chain_length) {
    if (mode == FaithMode::Lightweight) return 7;
    return 3LL * chain_length + 1;
}

ScoreReport score_candidate(const Question& q, const Candidate& cand,
                            const EstimationConfig& cfg, JudgeGateway& gateway,
                            const AnswerValue* reference) {
    cfg.validate();
    ScoreReport report;
    report.candidate_id = cand.candidate_id;
    report.answer = cand.answer;
    const RequestLedger before = gateway.ledger();

    try {
        double c_value = 1.0;
        if (cfg.ablation == Ablation::FaithfulnessOnly) {
            report.flags.push_back("ConsistencyForced");
        } else {
            const AnswerValue* ref = reference;
            std::string ref_used = "label";
            if (!ref) {
                ref = &cand.answer;
                ref_used = "candidate";
            }
            report.C = estimate_consistency(q, cand.chain, *ref, ref_used, cfg, gateway);
            c_value = report.C->value;
            // Alg. 1 short-circuit: zero consistency means zero faithfulness
            // requests.
            if (c_value == 0.0) report.pruned = true;
        }

        if (!report.pruned) {
            double f_value = 1.0;
            if (cfg.ablation == Ablation::ConsistencyOnly) {
                report.flags.push_back("FaithfulnessForced");
            } else {
                report.F =
                    estimate_faithfulness(q, cand.chain, cand.candidate_id, cfg, gateway);
                f_value = report.F->value;
            }
            report.R = c_value * f_value;
        }
    } catch (const Error& e) {
        report.error = e.what();
        report.R = 0.0;
        report.flags.push_back("ScoringError");
    }

    const RequestLedger after = gateway.ledger();
    report.ledger.consistency = after.consistency - before.consistency;
    report.ledger.generation = after.generation - before.generation;
    report.ledger.preference = after.preference - before.preference;
    report.ledger.completion = after.completion - before.completion;
    report.ledger.cache_hits = after.cache_hits - before.cache_hits;
    report.ledger.network = after.network - before.network;
    report.ledger.scripted = after.scripted - before.scripted;
    return report;
}

SelectionResult select_best(const Question& q, const std::vector<Candidate>& candidates,
                            const EstimationConfig& cfg, JudgeGateway& gateway) {
    if (candidates.empty()) throw EmptyPool("no candidates for question " + q.id);

    SelectionResult result;
    std::vector<std::size_t> ordinal;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        result.ranking.push_back(score_candidate(q, candidates[j], cfg, gateway));
        ordinal.push_back(j);
    }

    auto selectable = [](const ScoreReport& r) { return !r.pruned && r.error.empty(); };
    auto better = [&](std::size_t a, std::size_t b) {
        const ScoreReport& ra = result.ranking[a];
        const ScoreReport& rb = result.ranking[b];
        if (selectable(ra) != selectable(rb)) return selectable(ra);
        if (ra.R != rb.R) return ra.R > rb.R;
        const double ca = ra.C ? ra.C->value : 1.0;
        const double cb = rb.C ? rb.C->value : 1.0;
        if (ca != cb) return ca > cb;
        if (ra.has_flags() != rb.has_flags()) return !ra.has_flags();
        return a < b;
    };
    std::vector<std::size_t> order = ordinal;
    std::sort(order.begin(), order.end(), better);

    std::vector<ScoreReport> sorted;
    sorted.reserve(order.size());
    for (std::size_t idx : order) sorted.push_back(result.ranking[idx]);
    result.ranking = std::move(sorted);

    if (selectable(result.ranking.front())) {
        result.best = result.ranking.front().candidate_id;
        result.best_answer = result.ranking.front().answer;
        result.R_max = result.ranking.front().R;
    } else {
        // Alg. 1's argmax over an empty set: explicit fallback to the pool's
        // first candidate.
        result.fallback_used = true;
        result.best_answer = candidates.front().answer;
        result.R_max = 0.0;
    }
    return result;
}

// ---------------------------------------------------------------------------
// JSON report fragments
// ---------------------------------------------------------------------------

json consistency_to_json(const ConsistencyScore& c) {
    json trials = json::array();
    for (const auto& t : c.trials)
        trials.push_back({{"verdict", t.verdict},
                          {"prob", t.prob},
                          {"flagged", t.flagged},
                          {"transcript_key", t.transcript_key}});
    return {{"C", c.value},
            {"N", c.n_trials},
            {"prob_mode", to_string(c.prob_mode)},
            {"reference", c.reference_used},
            {"trials", trials}};
}

json faithfulness_to_json(const FaithfulnessScore& f) {
    json splits = json::array();
    for (const auto& s : f.splits) {
        json cells = json::array();
        for (const auto& c : s.cells)
            cells.push_back({{"perturbation", c.perturbation},
                             {"indicator", c.indicator},
                             {"raw_choice", c.raw_choice},
                             {"flags", c.flags},
                             {"original_position", std::string(1, c.original_position)},
                             {"excluded", c.excluded},
                             {"gen_key", c.gen_key},
                             {"pref_key", c.pref_key}});
        splits.push_back({{"i", s.i}, {"cells", cells}});
    }
    return {{"F", f.value},
            {"mode", to_string(f.mode)},
            {"sampled_splits", f.sampled_splits},
            {"flags", f.flags},
            {"splits", splits}};
}

json ledger_to_json(const RequestLedger& ledger) {
    return {{"consistency", ledger.consistency}, {"generation", ledger.generation},
            {"preference", ledger.preference},   {"completion", ledger.completion},
            {"cache_hits", ledger.cache_hits},   {"network", ledger.network}};
}

json report_to_json(const ScoreReport& report) {
    json j{{"schema", "facte/1"},
           {"record", "score"},
           {"candidate_id", report.candidate_id},
           {"answer", report.answer.canonical},
           {"R", report.R},
           {"pruned", report.pruned},
           {"flags", report.flags},
           // Logical counts only: cache-hit and network tallies vary between
           // cold and warm runs, and reports must reproduce byte for byte.
           {"request_ledger",
            {{"consistency", report.ledger.consistency},
             {"generation", report.ledger.generation},
             {"preference", report.ledger.preference},
             {"completion", report.ledger.completion}}}};
    j["C"] = report.C ? consistency_to_json(*report.C) : json(nullptr);
    j["F"] = report.F ? faithfulness_to_json(*report.F) : json(nullptr);
    if (!report.error.empty()) j["error"] = report.error;
    return j;
}

json selection_to_json(const Question& q, const SelectionResult& result,
                       const EstimationConfig& cfg, const std::vector<Candidate>* pool,
                       bool include_ranking) {
    json j{{"schema", "facte/1"},
           {"record", "selection"},
           {"question_id", q.id},
           {"question_text", q.text},
           {"task_kind", to_string(q.task_kind)},
           {"best", result.best ? json(*result.best) : json(nullptr)},
           {"best_answer",
            result.best_answer ? json(result.best_answer->canonical) : json(nullptr)},
           {"R_max", result.R_max},
           {"fallback_used", result.fallback_used},
           {"mode", to_string(cfg.mode)},
           {"ablation", to_string(cfg.ablation)},
           {"nominal_requests_per_query",
            {{"lightweight", nominal_requests(FaithMode::Lightweight, 0)},
             {"standard_formula", "3*L+1"}}}};
    if (pool && result.best) {
        for (const auto& cand : *pool) {
            if (cand.candidate_id != *result.best) continue;
            json steps = json::array();
            for (const auto& s : cand.chain.steps) steps.push_back(s.text);
            j["best_chain"] = steps;
            j["nominal_requests_per_query"]["standard"] =
                nominal_requests(FaithMode::Standard, cand.chain.length());
            break;
        }
    }
    if (include_ranking) {
        json ranking = json::array();
        for (const auto& r : result.ranking) ranking.push_back(report_to_json(r));
        j["ranking"] = ranking;
    }
    return j;
}

}  // namespace facte
