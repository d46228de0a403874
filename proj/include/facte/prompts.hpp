#pragma once

#include <string>
#include <vector>

#include "facte/chain.hpp"
#include "facte/perturbation.hpp"

namespace facte {

/// Marker the counterfactual-generation reply is parsed after.
inline constexpr const char* kCounterfactualMarker = "Contrastive Chain After Step t:";

/// Template for the True/False consistency judgment. Pure; throws MissingGold
/// when no reference answer is supplied.
std::string render_consistency_prompt(const Question& q, const ReasoningChain& chain,
                                      const AnswerValue& reference);

/// Template for generating a perturbed continuation after the split point.
std::string render_counterfactual_prompt(const Question& q, const SplitPair& split,
                                         const PerturbationType& e);

/// Pairwise A/B/NA continuation-preference template. Both options share the
/// rendered prefix.
std::string render_preference_prompt(const Question& q, const std::vector<Step>& prefix,
                                     const std::vector<Step>& option_a,
                                     const std::vector<Step>& option_b);

struct IclExemplar {
    std::string question;
    std::string cot;
    std::string answer;
};

/// Few-shot prompt with Question/CoT/Answer blocks in order; zero exemplars
/// degenerates to the zero-shot template.
std::string render_icl_prompt(const std::vector<IclExemplar>& exemplars,
                              const Question& query);

std::string render_zero_shot_prompt(const Question& query);

}  // namespace facte
