#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace facte {

enum class TaskKind { MathNumeric, MathExpression, MultipleChoice, FreeText };

std::string to_string(TaskKind k);
TaskKind task_kind_from_string(const std::string& s);

/// Exact rational with canonical sign/gcd form. Backs math-numeric answers so
/// "70,000" and "70000.0" compare equal.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t n, std::int64_t d);
    bool operator==(const Rational&) const = default;
    std::string str() const;
};

/// Canonical answer representation. Two values compare equal iff their
/// canonical forms are identical under the kind's equality rule.
struct AnswerValue {
    TaskKind kind = TaskKind::FreeText;
    std::string canonical;             // normalized surface form
    std::optional<Rational> rational;  // set for math-numeric
    std::string raw;                   // original surface form

    bool equals(const AnswerValue& other) const;
};

struct Question {
    std::string id;
    std::string text;
    std::optional<AnswerValue> gold_answer;
    TaskKind task_kind = TaskKind::MathNumeric;
};

struct Step {
    int index = 1;  // 1-based
    std::string text;
};

enum class ChainSource { ModelGenerated, DatasetProvided };

struct ReasoningChain {
    std::vector<Step> steps;
    ChainSource source = ChainSource::ModelGenerated;

    int length() const { return static_cast<int>(steps.size()); }
    /// Steps joined with newlines, in order.
    std::string joined() const;
};

struct Candidate {
    ReasoningChain chain;
    AnswerValue answer;
    std::string candidate_id;
};

/// A chain partitioned at split index i: prefix = steps 1..i, suffix = i+1..L.
struct SplitPair {
    int split_index = 1;
    std::vector<Step> prefix;
    std::vector<Step> suffix;
};

enum class SegmentationPolicy { ExplicitMarkers, SentenceBoundary, BlankLine };

std::string to_string(SegmentationPolicy p);
SegmentationPolicy segmentation_policy_from_string(const std::string& s);

/// Deterministically segments raw text into steps under the given policy.
/// Throws EmptyChain if nothing survives, MarkerPolicyMismatch when
/// explicit-markers is requested but no "Step k:" markers are present.
ReasoningChain segment_chain(const std::string& raw_text, SegmentationPolicy policy);

/// Builds a chain from pre-segmented step texts (trimmed, 1-based indices).
ReasoningChain chain_from_steps(const std::vector<std::string>& steps,
                                ChainSource source = ChainSource::DatasetProvided);

/// Splits a chain at i in [1, L-1]. Throws SingleStepChain for L = 1 and
/// OutOfRange otherwise.
SplitPair split_at(const ReasoningChain& chain, int i);

/// Normalizes a raw answer string for its task kind. Throws Unparseable when
/// no value of the declared kind can be extracted.
AnswerValue canonicalize_answer(const std::string& raw, TaskKind kind);

std::string join_steps(const std::vector<Step>& steps);
std::string trim(const std::string& s);

}  // namespace facte
