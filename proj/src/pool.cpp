#include "facte/pool.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "facte/errors.hpp"
#include "facte/rng.hpp"

namespace facte {

using nlohmann::json;

std::pair<ReasoningChain, SegmentationPolicy> segment_with_fallback(
    const std::string& raw_text, SegmentationPolicy policy) {
    try {
        return {segment_chain(raw_text, policy), policy};
    } catch (const MarkerPolicyMismatch&) {
        return {segment_chain(raw_text, SegmentationPolicy::SentenceBoundary),
                SegmentationPolicy::SentenceBoundary};
    }
}

static Question question_from_json(const json& j) {
    Question q;
    q.id = j.at("id").get<std::string>();
    q.text = j.at("question").get<std::string>();
    if (q.text.empty()) throw ConfigError("question text empty for id " + q.id);
    q.task_kind = task_kind_from_string(j.value("task_kind", "math-numeric"));
    if (j.contains("gold_answer") && !j["gold_answer"].is_null())
        q.gold_answer = canonicalize_answer(j["gold_answer"].get<std::string>(), q.task_kind);
    return q;
}

PoolEntry parse_pool_line(const std::string& line, SegmentationPolicy policy) {
    json j = json::parse(line);
    PoolEntry entry;
    entry.question = question_from_json(j);
    for (const auto& cj : j.at("candidates")) {
        Candidate cand;
        cand.candidate_id = cj.at("candidate_id").get<std::string>();
        const bool has_text = cj.contains("chain_text") && !cj["chain_text"].is_null();
        const bool has_steps = cj.contains("steps") && !cj["steps"].is_null();
        if (has_text == has_steps)
            throw ConfigError("candidate " + cand.candidate_id +
                              " must carry exactly one of chain_text / steps");
        if (has_text) {
            cand.chain =
                segment_with_fallback(cj["chain_text"].get<std::string>(), policy).first;
        } else {
            cand.chain = chain_from_steps(cj["steps"].get<std::vector<std::string>>());
        }
        cand.answer = canonicalize_answer(cj.at("answer").get<std::string>(),
                                          entry.question.task_kind);
        entry.candidates.push_back(std::move(cand));
    }
    if (entry.candidates.empty())
        throw ConfigError("question " + entry.question.id + " has no candidates");
    return entry;
}

PoolLoadResult load_pool_file(const std::string& path, SegmentationPolicy policy) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open pool file: " + path);
    PoolLoadResult result;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            result.entries.push_back(parse_pool_line(line, policy));
        } catch (const std::exception& e) {
            result.errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return result;
}

std::vector<Exemplar> load_exemplar_file(const std::string& path,
                                         SegmentationPolicy policy) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open exemplar file: " + path);
    std::vector<Exemplar> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j = json::parse(line);
        Exemplar ex;
        ex.question.id = j.value("id", "exemplar-" + std::to_string(lineno));
        ex.question.text = j.at("question").get<std::string>();
        ex.question.task_kind = task_kind_from_string(j.value("task_kind", "math-numeric"));
        ex.chain = segment_with_fallback(j.at("cot").get<std::string>(), policy).first;
        ex.label =
            canonicalize_answer(j.at("answer").get<std::string>(), ex.question.task_kind);
        ex.question.gold_answer = ex.label;
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<Question> load_testset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open testset file: " + path);
    std::vector<Question> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        out.push_back(question_from_json(json::parse(line)));
    }
    return out;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file for digest: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    char buf[33];
    std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)),
                  static_cast<unsigned long long>(fnv1a64(data, 0x9ae16a3b2f90404fULL)));
    return buf;
}

std::string iso8601_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json manifest_to_json(const RunManifest& m) {
    return {{"command", m.command},
            {"config", m.config_snapshot},
            {"input_digests", m.input_digests},
            {"seed", m.seed},
            {"started_at", m.started_at},
            {"finished_at", m.finished_at},
            {"ledger_totals", m.ledger_totals},
            {"tool_version", m.tool_version}};
}

void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    out << manifest_to_json(m).dump(2) << "\n";
}

}  // namespace facte
