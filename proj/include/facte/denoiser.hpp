#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "facte/chain.hpp"
#include "facte/config.hpp"
#include "facte/gateway.hpp"
#include "facte/selector.hpp"

namespace facte {

/// A supervised in-context demonstration: (question, chain, label).
struct Exemplar {
    Question question;
    ReasoningChain chain;
    AnswerValue label;
    std::optional<ScoreReport> report;
};

enum class PromptSetOrigin { Noisy, Clean, Selected };

std::string to_string(PromptSetOrigin o);

struct PromptSet {
    std::vector<Exemplar> exemplars;
    PromptSetOrigin origin = PromptSetOrigin::Noisy;
};

/// Scores every exemplar against its label and retains those with C > 0 and
/// R >= tau, preserving input order. Per-exemplar reports are attached.
PromptSet filter_prompt_set(const PromptSet& pset, const DenoiseConfig& cfg,
                            JudgeGateway& gateway);

/// Renders the few-shot prompt (zero exemplars -> zero-shot template).
std::string build_icl_prompt(const PromptSet& exemplars, const Question& query);

struct ItemRecord {
    std::string question_id;
    std::string model_answer;
    std::string gold_answer;
    bool correct = false;
    bool extraction_failed = false;
};

struct AccuracyMetrics {
    double acc = 0.0;
    int n = 0;
    std::vector<ItemRecord> items;
};

/// Answers every test item through the gateway using the given prompt set and
/// scores exact-match accuracy against gold. Extraction failures count as
/// incorrect and are flagged.
AccuracyMetrics evaluate_accuracy(const std::vector<Question>& testset,
                                  const PromptSet& exemplars, JudgeGateway& gateway);

/// Pulls the model's "Answer: ..." line out of a completion; falls back to the
/// last non-empty line.
std::string extract_answer_text(const std::string& completion);

nlohmann::json metrics_to_json(const AccuracyMetrics& metrics, int kept, int dropped,
                               double tau);

}  // namespace facte
