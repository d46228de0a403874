#include "facte/consistency.hpp"

#include <algorithm>
#include <cctype>

#include "facte/errors.hpp"
#include "facte/prompts.hpp"

namespace facte {

std::string to_string(ProbMode m) {
    return m == ProbMode::TokenProb ? "token-prob" : "unit";
}

/// Position of the first word-bounded, case-insensitive occurrence of `word`.
static std::size_t find_word(const std::string& text, const std::string& word) {
    auto lower = [](char c) {
        return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    };
    for (std::size_t i = 0; i + word.size() <= text.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < word.size(); ++j) {
            if (lower(text[i + j]) != lower(word[j])) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        bool left_ok = (i == 0) || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
        std::size_t end = i + word.size();
        bool right_ok =
            (end == text.size()) || !std::isalnum(static_cast<unsigned char>(text[end]));
        if (left_ok && right_ok) return i;
    }
    return std::string::npos;
}

static std::string trim_token(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

VerdictParse parse_verdict(const JudgeResponse& resp) {
    const std::size_t p_true = find_word(resp.text, "True");
    const std::size_t p_false = find_word(resp.text, "False");
    VerdictParse out;
    if (p_true == std::string::npos && p_false == std::string::npos) {
        out.flagged = true;
        return out;
    }
    out.verdict = p_true < p_false;

    if (resp.token_probs) {
        auto equals_ci = [](const std::string& a, const char* b) {
            std::string t = trim_token(a);
            if (t.size() != std::string(b).size()) return false;
            for (std::size_t i = 0; i < t.size(); ++i)
                if (std::tolower(static_cast<unsigned char>(t[i])) !=
                    std::tolower(static_cast<unsigned char>(b[i])))
                    return false;
            return true;
        };
        double mass_true = 0.0, mass_false = 0.0;
        for (const auto& [tok, p] : *resp.token_probs) {
            if (equals_ci(tok, "True")) mass_true = std::max(mass_true, p);
            if (equals_ci(tok, "False")) mass_false = std::max(mass_false, p);
        }
        const double verdict_mass = out.verdict ? mass_true : mass_false;
        if (verdict_mass > 0.0) {
            const double total = mass_true + mass_false;
            // With only the verdict token observed, use its mass directly.
            out.prob = (mass_true > 0.0 && mass_false > 0.0) ? verdict_mass / total
                                                             : std::min(verdict_mass, 1.0);
            out.token_prob_used = true;
            return out;
        }
    }
    out.prob = 1.0;
    return out;
}

ConsistencyScore estimate_consistency(const Question& q, const ReasoningChain& chain,
                                      const AnswerValue& reference,
                                      const std::string& reference_used,
                                      const EstimationConfig& cfg, JudgeGateway& gateway) {
    cfg.validate();
    const std::string prompt = render_consistency_prompt(q, chain, reference);
    ConsistencyScore score;
    score.n_trials = cfg.n_trials;
    score.reference_used = reference_used;

    double acc = 0.0;
    bool any_token_prob = false;
    for (int n = 1; n <= cfg.n_trials; ++n) {
        JudgeRequest req;
        req.kind = RequestKind::Consistency;
        req.prompt = prompt;
        req.decoding.temperature = cfg.trial_temperature;
        req.decoding.want_token_probs = true;
        // Temperature 0 is deterministic: all trials share one cache entry.
        if (cfg.trial_temperature > 0.0) req.trial_tag = std::to_string(n - 1);
        JudgeResponse resp = gateway.submit(req);
        VerdictParse v = parse_verdict(resp);
        ConsistencyTrial trial;
        trial.trial_index = n;
        trial.verdict = v.verdict && !v.flagged;
        trial.prob = trial.verdict ? v.prob : 0.0;
        trial.flagged = v.flagged;
        trial.transcript_key = resp.cache_key;
        any_token_prob |= v.token_prob_used;
        if (trial.verdict) acc += trial.prob;
        score.trials.push_back(std::move(trial));
    }
    score.value = acc / cfg.n_trials;
    score.prob_mode = any_token_prob ? ProbMode::TokenProb : ProbMode::Unit;
    return score;
}

}  // namespace facte
