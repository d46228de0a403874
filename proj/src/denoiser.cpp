#include "facte/denoiser.hpp"

#include <regex>

#include "facte/errors.hpp"
#include "facte/prompts.hpp"

namespace facte {

using nlohmann::json;

std::string to_string(PromptSetOrigin o) {
    switch (o) {
        case PromptSetOrigin::Noisy: return "noisy";
        case PromptSetOrigin::Clean: return "clean";
        case PromptSetOrigin::Selected: return "selected";
    }
    return "noisy";
}

PromptSet filter_prompt_set(const PromptSet& pset, const DenoiseConfig& cfg,
                            JudgeGateway& gateway) {
    cfg.validate();
    PromptSet clean;
    clean.origin = PromptSetOrigin::Clean;
    for (std::size_t idx = 0; idx < pset.exemplars.size(); ++idx) {
        const Exemplar& ex = pset.exemplars[idx];
        Candidate cand;
        cand.chain = ex.chain;
        cand.answer = ex.label;
        cand.candidate_id = ex.question.id.empty()
                                ? "exemplar-" + std::to_string(idx)
                                : ex.question.id;
        // Consistency judges against the exemplar's label.
        ScoreReport report =
            score_candidate(ex.question, cand, cfg.estimation, gateway, &ex.label);
        const double c = report.C ? report.C->value : 1.0;
        if (!report.error.empty()) continue;
        if (c > 0.0 && report.R >= cfg.tau) {
            Exemplar kept = ex;
            kept.report = std::move(report);
            clean.exemplars.push_back(std::move(kept));
        }
    }
    return clean;
}

std::string build_icl_prompt(const PromptSet& exemplars, const Question& query) {
    std::vector<IclExemplar> blocks;
    blocks.reserve(exemplars.exemplars.size());
    for (const auto& ex : exemplars.exemplars)
        blocks.push_back(
            {ex.question.text, ex.chain.joined(), ex.label.canonical});
    return render_icl_prompt(blocks, query);
}

std::string extract_answer_text(const std::string& completion) {
    static const std::regex answer_line(R"(Answer\s*:\s*(.+))", std::regex::icase);
    std::string found;
    for (auto it = std::sregex_iterator(completion.begin(), completion.end(), answer_line);
         it != std::sregex_iterator(); ++it) {
        found = trim((*it)[1].str());  // keep the last Answer: line
    }
    if (!found.empty()) return found;
    // Fall back to the last non-empty line.
    std::size_t end = completion.find_last_not_of(" \t\r\n");
    if (end == std::string::npos) return "";
    std::size_t start = completion.find_last_of('\n', end);
    start = (start == std::string::npos) ? 0 : start + 1;
    return trim(completion.substr(start, end - start + 1));
}

AccuracyMetrics evaluate_accuracy(const std::vector<Question>& testset,
                                  const PromptSet& exemplars, JudgeGateway& gateway) {
    if (testset.empty()) throw EmptyTestset("empty test set");
    AccuracyMetrics metrics;
    metrics.n = static_cast<int>(testset.size());
    int correct = 0;
    for (const auto& q : testset) {
        if (!q.gold_answer) throw MissingGold("test item without gold answer: " + q.id);
        JudgeRequest req;
        req.kind = RequestKind::Completion;
        req.prompt = build_icl_prompt(exemplars, q);
        req.decoding.temperature = gateway.config().temperature;
        ItemRecord rec;
        rec.question_id = q.id;
        rec.gold_answer = q.gold_answer->canonical;
        try {
            JudgeResponse resp = gateway.submit(req);
            rec.model_answer = extract_answer_text(resp.text);
            AnswerValue model = canonicalize_answer(rec.model_answer, q.task_kind);
            rec.correct = model.equals(*q.gold_answer);
        } catch (const Unparseable&) {
            rec.extraction_failed = true;
        }
        if (rec.correct) ++correct;
        metrics.items.push_back(std::move(rec));
    }
    metrics.acc = static_cast<double>(correct) / metrics.n;
    return metrics;
}

json metrics_to_json(const AccuracyMetrics& metrics, int kept, int dropped, double tau) {
    json items = json::array();
    for (const auto& item : metrics.items)
        items.push_back({{"question_id", item.question_id},
                         {"model_answer", item.model_answer},
                         {"gold_answer", item.gold_answer},
                         {"correct", item.correct},
                         {"extraction_failed", item.extraction_failed}});
    return {{"acc", metrics.acc}, {"n", metrics.n},     {"kept", kept},
            {"dropped", dropped}, {"tau", tau},         {"items", items}};
}

}  // namespace facte
