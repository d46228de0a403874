#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "facte/chain.hpp"
#include "facte/config.hpp"
#include "facte/denoiser.hpp"

namespace facte {

struct PoolEntry {
    Question question;
    std::vector<Candidate> candidates;
};

struct PoolLoadResult {
    std::vector<PoolEntry> entries;
    std::vector<std::string> errors;  // one message per malformed line, skipped
};

/// Segments with the requested policy, falling back to sentence-boundary when
/// explicit markers are absent. Returns the chain and the policy that applied.
std::pair<ReasoningChain, SegmentationPolicy> segment_with_fallback(
    const std::string& raw_text, SegmentationPolicy policy);

/// Pool ingestion: JSONL, one question per line with its candidate list.
PoolLoadResult load_pool_file(const std::string& path, SegmentationPolicy policy);
PoolEntry parse_pool_line(const std::string& line, SegmentationPolicy policy);

/// Exemplar file: JSONL of {"question", "cot", "answer"} (optional "id",
/// "task_kind").
std::vector<Exemplar> load_exemplar_file(const std::string& path,
                                         SegmentationPolicy policy);

/// Test set: JSONL of {"id", "question", "gold_answer", "task_kind"}.
std::vector<Question> load_testset_file(const std::string& path);

/// Hex digest of a file's bytes, for run manifests.
std::string file_digest(const std::string& path);

/// Everything needed to reproduce a run byte-for-byte given a warm cache.
struct RunManifest {
    std::string command;
    nlohmann::json config_snapshot;
    nlohmann::json input_digests;
    std::uint64_t seed = 0;
    std::string started_at;
    std::string finished_at;
    nlohmann::json ledger_totals;
    std::string tool_version;
};

nlohmann::json manifest_to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& path);
std::string iso8601_timestamp();

inline constexpr const char* kToolVersion = "facte 0.1.0";

}  // namespace facte
