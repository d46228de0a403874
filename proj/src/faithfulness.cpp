#include "facte/faithfulness.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "facte/errors.hpp"
#include "facte/prompts.hpp"

namespace facte {

std::vector<int> split_schedule(int L, FaithMode mode, int N, KeyedStream& rng) {
    if (L <= 1) return {};
    std::vector<int> all(L - 1);
    std::iota(all.begin(), all.end(), 1);
    if (mode == FaithMode::Standard) return all;
    const int want = std::min(N, L - 1);
    // Partial Fisher-Yates, then ascending order for stable reports.
    for (int k = 0; k < want; ++k) {
        int j = static_cast<int>(rng.uniform_int(k, L - 2));
        std::swap(all[k], all[j]);
    }
    all.resize(want);
    std::sort(all.begin(), all.end());
    return all;
}

std::optional<std::string> parse_choice(const std::string& text) {
    auto bounded = [&](std::size_t i, std::size_t len) {
        bool left_ok = (i == 0) || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
        std::size_t end = i + len;
        bool right_ok =
            (end == text.size()) || !std::isalnum(static_cast<unsigned char>(text[end]));
        return left_ok && right_ok;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == 'N' && i + 1 < text.size() && text[i + 1] == 'A' && bounded(i, 2))
            return std::string("NA");
        if ((text[i] == 'A' || text[i] == 'B') && bounded(i, 1))
            return std::string(1, text[i]);
    }
    return std::nullopt;
}

CounterfactualSuffix generate_counterfactual(const Question& q, const SplitPair& split,
                                             const PerturbationType& e,
                                             SegmentationPolicy policy,
                                             JudgeGateway& gateway) {
    JudgeRequest req;
    req.kind = RequestKind::CounterfactualGeneration;
    req.prompt = render_counterfactual_prompt(q, split, e);
    req.decoding.temperature = gateway.config().temperature;
    JudgeResponse resp = gateway.submit(req);

    CounterfactualSuffix out;
    out.split_index = split.split_index;
    out.perturbation = e.name;
    out.transcript_key = resp.cache_key;

    std::string body = resp.text;
    const std::string marker = kCounterfactualMarker;
    auto pos = body.find(marker);
    if (pos != std::string::npos) body = body.substr(pos + marker.size());
    body = trim(body);
    if (body.empty()) {
        out.empty_reply = true;
        return out;
    }
    ReasoningChain rollout;
    try {
        rollout = segment_chain(body, policy);
    } catch (const MarkerPolicyMismatch&) {
        rollout = segment_chain(body, SegmentationPolicy::SentenceBoundary);
    } catch (const EmptyChain&) {
        out.empty_reply = true;
        return out;
    }
    out.steps = rollout.steps;
    out.duplicate_of_original = join_steps(out.steps) == join_steps(split.suffix);
    return out;
}

PreferenceOutcome judge_preference(const Question& q, const std::vector<Step>& prefix,
                                   const std::vector<Step>& original_suffix,
                                   const std::vector<Step>& counterfactual_steps,
                                   bool fixed_positions, JudgeGateway& gateway,
                                   KeyedStream& rng) {
    const bool original_in_a = fixed_positions ? true : rng.coin();

    JudgeRequest req;
    req.kind = RequestKind::Preference;
    req.prompt = render_preference_prompt(
        q, prefix, original_in_a ? original_suffix : counterfactual_steps,
        original_in_a ? counterfactual_steps : original_suffix);
    req.decoding.temperature = gateway.config().temperature;
    JudgeResponse resp = gateway.submit(req);

    PreferenceOutcome out;
    out.original_position = original_in_a ? 'A' : 'B';
    out.transcript_key = resp.cache_key;
    auto choice = parse_choice(resp.text);
    if (!choice) {
        out.unparseable = true;
        out.raw_choice = "NA";
        out.indicator = 0;
        return out;
    }
    out.raw_choice = *choice;
    out.indicator =
        (out.raw_choice.size() == 1 && out.raw_choice[0] == out.original_position) ? 1 : 0;
    return out;
}

FaithfulnessScore estimate_faithfulness(const Question& q, const ReasoningChain& chain,
                                        const std::string& candidate_id,
                                        const EstimationConfig& cfg,
                                        JudgeGateway& gateway) {
    cfg.validate();
    FaithfulnessScore score;
    score.mode = cfg.mode;

    const int L = chain.length();
    if (L <= 1) {
        // No internal transition exists; vacuous faithfulness, flagged.
        score.value = 1.0;
        score.flags.push_back("SingleStepChain");
        return score;
    }

    KeyedStream schedule_rng(cfg.seed, stream_key(candidate_id, 0, "schedule"));
    score.sampled_splits = split_schedule(L, cfg.mode, cfg.n_trials, schedule_rng);

    const auto& catalog = perturbation_catalog();
    int included = 0;
    int positive = 0;
    for (int i : score.sampled_splits) {
        SplitPair split = split_at(chain, i);
        SplitRecord srec;
        srec.i = i;

        std::vector<const PerturbationType*> perts;
        if (cfg.perturbations == PerturbationPolicy::All) {
            for (const auto& p : catalog) perts.push_back(&p);
        } else {
            KeyedStream pick(cfg.seed, stream_key(candidate_id, i, "perturbation"));
            perts.push_back(
                &catalog[static_cast<std::size_t>(pick.uniform_int(0, static_cast<std::int64_t>(catalog.size()) - 1))]);
        }

        for (const PerturbationType* e : perts) {
            CellRecord cell;
            cell.perturbation = e->name;
            CounterfactualSuffix cf =
                generate_counterfactual(q, split, *e, cfg.segmentation, gateway);
            cell.gen_key = cf.transcript_key;
            if (cf.empty_reply) {
                cell.flags.push_back("EmptyCounterfactual");
                cell.excluded = true;
                cell.raw_choice = "NA";
                srec.cells.push_back(std::move(cell));
                continue;
            }
            if (cf.duplicate_of_original) {
                // Judge ignored the instruction; counts against faithfulness.
                cell.flags.push_back("DuplicateCounterfactual");
                cell.indicator = 0;
                cell.raw_choice = "NA";
                ++included;
                srec.cells.push_back(std::move(cell));
                continue;
            }
            KeyedStream pos_rng(cfg.seed, stream_key(candidate_id, i, e->name + "/position"));
            PreferenceOutcome pref =
                judge_preference(q, split.prefix, split.suffix, cf.steps,
                                 cfg.fixed_positions, gateway, pos_rng);
            cell.pref_key = pref.transcript_key;
            cell.indicator = pref.indicator;
            cell.raw_choice = pref.raw_choice;
            cell.original_position = pref.original_position;
            if (pref.unparseable) cell.flags.push_back("UnparseableChoice");
            ++included;
            positive += pref.indicator;
            srec.cells.push_back(std::move(cell));
        }
        score.splits.push_back(std::move(srec));
    }

    if (included == 0)
        throw AllCellsFlagged("all (split, perturbation) cells flagged for " + candidate_id);
    score.value = static_cast<double>(positive) / included;
    return score;
}

}  // namespace facte
