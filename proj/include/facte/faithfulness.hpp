#pragma once

#include <optional>
#include <string>
#include <vector>

#include "facte/chain.hpp"
#include "facte/config.hpp"
#include "facte/gateway.hpp"
#include "facte/perturbation.hpp"

namespace facte {

struct CounterfactualSuffix {
    int split_index = 0;
    std::string perturbation;
    std::vector<Step> steps;  // empty when the judge returned nothing usable
    std::string transcript_key;
    bool empty_reply = false;
    bool duplicate_of_original = false;
};

struct PreferenceOutcome {
    int indicator = 0;  // 1 iff the original suffix was preferred
    std::string raw_choice;  // A, B, or NA
    char original_position = 'A';  // physical slot that held the original
    bool unparseable = false;
    std::string transcript_key;
};

struct CellRecord {
    std::string perturbation;
    int indicator = 0;
    std::string raw_choice;
    std::vector<std::string> flags;
    std::string gen_key;
    std::string pref_key;
    char original_position = 'A';
    bool excluded = false;  // removed from the denominator
};

struct SplitRecord {
    int i = 0;
    std::vector<CellRecord> cells;
};

struct FaithfulnessScore {
    double value = 0.0;  // mean indicator over non-excluded cells
    std::vector<SplitRecord> splits;
    FaithMode mode = FaithMode::Lightweight;
    std::vector<int> sampled_splits;
    std::vector<std::string> flags;
};

/// Split indices to inspect: standard covers 1..L-1; lightweight samples
/// min(N, L-1) distinct indices from the seeded stream. L = 1 yields [].
std::vector<int> split_schedule(int L, FaithMode mode, int N, KeyedStream& rng);

/// One perturbed continuation rollout, parsed after the contrastive marker and
/// segmented under the active policy (sentence-boundary fallback).
CounterfactualSuffix generate_counterfactual(const Question& q, const SplitPair& split,
                                             const PerturbationType& e,
                                             SegmentationPolicy policy,
                                             JudgeGateway& gateway);

/// One pairwise preference with position debiasing drawn from the stream;
/// NA and unparseable replies score 0.
PreferenceOutcome judge_preference(const Question& q, const std::vector<Step>& prefix,
                                   const std::vector<Step>& original_suffix,
                                   const std::vector<Step>& counterfactual_steps,
                                   bool fixed_positions, JudgeGateway& gateway,
                                   KeyedStream& rng);

/// Full faithfulness estimate for one chain. L = 1 scores 1.0 with a
/// SingleStepChain flag; a chain whose every cell is excluded raises
/// AllCellsFlagged.
FaithfulnessScore estimate_faithfulness(const Question& q, const ReasoningChain& chain,
                                        const std::string& candidate_id,
                                        const EstimationConfig& cfg,
                                        JudgeGateway& gateway);

/// First word-bounded A/B/NA token in a preference reply (case-sensitive).
std::optional<std::string> parse_choice(const std::string& text);

}  // namespace facte
