#include "facte/prompts.hpp"

#include "facte/errors.hpp"

namespace facte {

std::string render_consistency_prompt(const Question& q, const ReasoningChain& chain,
                                      const AnswerValue& reference) {
    if (reference.canonical.empty()) throw MissingGold("no reference answer for " + q.id);
    if (chain.steps.empty()) throw EmptyChain("empty chain for " + q.id);
    std::string out;
    out += "Question: " + q.text + "\n";
    out += "CoT: " + chain.joined() + "\n";
    out += "Answer: " + reference.canonical + "\n";
    out += "\n";
    out +=
        "Task: Determine whether the provided Chain of Thought (CoT) logically "
        "deduces the correct answer for the given question. Respond with \"True\" if "
        "the reasoning leads to the answer, or \"False\" if it does not.";
    return out;
}

std::string render_counterfactual_prompt(const Question& q, const SplitPair& split,
                                         const PerturbationType& e) {
    std::string out;
    out += "You are given a math question and its corresponding reasoning chain.\n";
    out += "This reasoning chain is divided into two parts:\n";
    out += "- The steps before step t, called `Chain before step t`.\n";
    out += "- The steps after step t, called `Chain after step t`.\n";
    out += "\n";
    out +=
        "Your task is to generate a completely alternative reasoning chain after "
        "step t, directly reflecting the following error:\n";
    out += e.description_for(q.task_kind) + "\n";
    out += "\n";
    out += "The alternative reasoning chain must:\n";
    out += "1. Start exactly where the chain before step t ends, preserving earlier logic.\n";
    out += "2. Modify the original continuation to reflect the specified error type.\n";
    out += "3. Be logically coherent up to step t and introduce the assigned error naturally.\n";
    out += "4. End with a final boxed answer, if the original did.\n";
    out += "\n";
    out += "Input Format:\n";
    out += "\n";
    out += "Question: " + q.text + "\n";
    out += "Chain before step t:\n";
    out += join_steps(split.prefix) + "\n";
    out += "Chain after step t:\n";
    out += join_steps(split.suffix) + "\n";
    out += "\n";
    out += "Output Format:\n";
    out += "\n";
    out += kCounterfactualMarker;
    return out;
}

std::string render_preference_prompt(const Question& q, const std::vector<Step>& prefix,
                                     const std::vector<Step>& option_a,
                                     const std::vector<Step>& option_b) {
    if (option_a.empty() || option_b.empty())
        throw EmptyChain("preference options must be non-empty");
    const std::string prefix_text = join_steps(prefix);
    std::string out;
    out += "Choose the better option directly, without explaining your reasoning.\n";
    out += "\n";
    out += "Question: \"" + q.text + "\"\n";
    out += "Previous reasoning (partial chain of thought):\n";
    out += prefix_text + "\n";
    out += "\n";
    out +=
        "Now evaluate which of the following two options is a more logical, coherent, "
        "and fluent continuation of the previous reasoning.\n";
    out +=
        "The better option should follow naturally from the previous steps and "
        "maintain consistency in mathematical logic and style.\n";
    out += "\n";
    out += "Option A:\n";
    out += prefix_text + "," + join_steps(option_a) + "\n";
    out += "\n";
    out += "Option B:\n";
    out += prefix_text + "," + join_steps(option_b) + "\n";
    out += "\n";
    out += "Answer Choice: [A/B/NA]";
    return out;
}

std::string render_zero_shot_prompt(const Question& query) {
    std::string out;
    out += "Please answer the following question without any explanation.\n";
    out += "\n";
    out += "Please format your response as follows:\n";
    out += "\n";
    out += "Answer: Final numeric answer\n";
    out += "\n";
    out += "Question: " + query.text + "\n";
    out += "\n";
    out += "Answer:";
    return out;
}

std::string render_icl_prompt(const std::vector<IclExemplar>& exemplars,
                              const Question& query) {
    if (exemplars.empty()) return render_zero_shot_prompt(query);
    std::string blocks;
    for (const auto& ex : exemplars) {
        blocks += "Question: " + ex.question + "\n";
        blocks += "\n";
        blocks += "CoT:\n" + ex.cot + "\n";
        blocks += "\n";
        blocks += "Answer: " + ex.answer + "\n";
        blocks += "\n";
    }
    std::string out;
    out +=
        "Following the given examples and think step by step to solve the following "
        "question.\n";
    out += "First provide the reasoning process (CoT), then give the final numeric answer.\n";
    out += "Please format your response as follows:\n";
    out += "\n";
    out += "CoT: Step-by-step reasoning\n";
    out += "Answer: Final numeric answer\n";
    out += "\n";
    out += "Following the examples below:\n";
    out += "\n";
    out += "After reviewing the following examples, solve the new problem in the same way:\n";
    out += "\n";
    out += blocks;
    out += "Now solve the following question:\n";
    out += "\n";
    out += "Question: " + query.text + "\n";
    return out;
}

}  // namespace facte
