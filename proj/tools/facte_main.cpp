// facte: batch driver for tandem CoT reliability scoring.
//
// Subcommands: select, denoise, icl, report. Exit codes: 0 clean, 1 fatal
// config/IO error, 2 partial failures.

#include <cstdio>
#include <fstream>
#include <map>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "facte/config.hpp"
#include "facte/denoiser.hpp"
#include "facte/errors.hpp"
#include "facte/pool.hpp"
#include "facte/selector.hpp"

using nlohmann::json;
namespace fc = facte;

namespace {

struct SharedArgs {
    std::string config_path;
    std::string backend;
    std::string endpoint;
    std::string model;
    std::optional<int> n_trials;
    std::string mode;
    std::string ablation;
    std::string perturbations;
    bool fixed_positions = false;
    std::optional<double> tau;
    std::optional<std::uint64_t> seed;
    std::string cache_path;
    std::string transcript_path;
    std::optional<int> concurrency;
    std::string rules_path;
    std::string out_path;
};

void add_shared_flags(CLI::App* cmd, SharedArgs& args) {
    cmd->add_option("--config", args.config_path, "Config file (sections: backend, estimation, denoise)");
    cmd->add_option("--backend", args.backend, "wire|scripted")
        ->check(CLI::IsMember({"wire", "scripted"}));
    cmd->add_option("--endpoint", args.endpoint, "Chat-completions endpoint URL");
    cmd->add_option("--model", args.model, "Model id");
    cmd->add_option("--n-trials", args.n_trials, "Sampling/checkpoint budget N");
    cmd->add_option("--mode", args.mode, "standard|lightweight")
        ->check(CLI::IsMember({"standard", "lightweight"}));
    cmd->add_option("--ablation", args.ablation, "full|c-only|f-only")
        ->check(CLI::IsMember({"full", "c-only", "f-only", "consistency-only", "faithfulness-only"}));
    cmd->add_option("--perturbations", args.perturbations, "one-per-split|all")
        ->check(CLI::IsMember({"one-per-split", "all"}));
    cmd->add_flag("--fixed-positions", args.fixed_positions,
                  "Always place the original continuation in slot A");
    cmd->add_option("--tau", args.tau, "Denoise retention threshold in [0,1]");
    cmd->add_option("--seed", args.seed, "Root seed for all derived randomness");
    cmd->add_option("--cache", args.cache_path, "Persistent response cache (JSONL)");
    cmd->add_option("--transcript", args.transcript_path, "Transcript log (JSONL)");
    cmd->add_option("--concurrency", args.concurrency, "Backend concurrency limit");
    cmd->add_option("--rules", args.rules_path, "Scripted oracle rules file (JSON)");
    cmd->add_option("--out", args.out_path, "Output path")->required();
}

// Config file first, CLI flags win.
fc::AppConfig resolve_config(const SharedArgs& args) {
    fc::AppConfig cfg;
    if (!args.config_path.empty()) cfg = fc::load_config_file(args.config_path);
    if (!args.backend.empty())
        cfg.backend.backend =
            args.backend == "wire" ? fc::BackendKind::Wire : fc::BackendKind::Scripted;
    if (!args.endpoint.empty()) cfg.backend.endpoint_url = args.endpoint;
    if (!args.model.empty()) cfg.backend.model_id = args.model;
    if (args.concurrency) cfg.backend.concurrency_limit = *args.concurrency;
    if (args.n_trials) cfg.estimation.n_trials = *args.n_trials;
    if (!args.mode.empty()) cfg.estimation.mode = fc::faith_mode_from_string(args.mode);
    if (!args.ablation.empty())
        cfg.estimation.ablation = fc::ablation_from_string(args.ablation);
    if (!args.perturbations.empty())
        cfg.estimation.perturbations =
            fc::perturbation_policy_from_string(args.perturbations);
    if (args.fixed_positions) cfg.estimation.fixed_positions = true;
    if (args.seed) cfg.estimation.seed = *args.seed;
    if (args.tau) cfg.denoise.tau = *args.tau;
    cfg.denoise.estimation = cfg.estimation;
    cfg.backend.validate();
    cfg.estimation.validate();
    cfg.denoise.validate();
    return cfg;
}

json config_snapshot(const fc::AppConfig& cfg) {
    return {{"backend",
             {{"backend", cfg.backend.backend == fc::BackendKind::Wire ? "wire" : "scripted"},
              {"endpoint_url", cfg.backend.endpoint_url},
              {"model_id", cfg.backend.model_id},
              {"temperature", cfg.backend.temperature},
              {"max_retries", cfg.backend.max_retries},
              {"concurrency_limit", cfg.backend.concurrency_limit}}},
            {"estimation",
             {{"n_trials", cfg.estimation.n_trials},
              {"mode", fc::to_string(cfg.estimation.mode)},
              {"ablation", fc::to_string(cfg.estimation.ablation)},
              {"perturbations", fc::to_string(cfg.estimation.perturbations)},
              {"seed", cfg.estimation.seed},
              {"fixed_positions", cfg.estimation.fixed_positions},
              {"trial_temperature", cfg.estimation.trial_temperature},
              {"segmentation", fc::to_string(cfg.estimation.segmentation)}}},
            {"denoise", {{"tau", cfg.denoise.tau}}}};
}

std::unique_ptr<fc::JudgeGateway> make_gateway(const fc::AppConfig& cfg,
                                               const SharedArgs& args) {
    auto gateway = std::make_unique<fc::JudgeGateway>(cfg.backend, cfg.estimation.seed);
    if (cfg.backend.backend == fc::BackendKind::Scripted) {
        if (args.rules_path.empty())
            throw fc::ConfigError("scripted backend requires --rules");
        gateway->set_scripted_oracle(
            fc::ScriptedOracle::from_json_file(args.rules_path, cfg.estimation.seed));
    }
    if (!args.cache_path.empty()) gateway->attach_cache_file(args.cache_path);
    if (!args.transcript_path.empty()) gateway->attach_transcript_file(args.transcript_path);
    return gateway;
}

fc::RunManifest start_manifest(const std::string& command, const fc::AppConfig& cfg) {
    fc::RunManifest m;
    m.command = command;
    m.config_snapshot = config_snapshot(cfg);
    m.input_digests = json::object();
    m.seed = cfg.estimation.seed;
    m.started_at = fc::iso8601_timestamp();
    m.tool_version = fc::kToolVersion;
    return m;
}

void finish_manifest(fc::RunManifest& m, const fc::JudgeGateway& gateway,
                     const std::string& out_path) {
    m.finished_at = fc::iso8601_timestamp();
    m.ledger_totals = fc::ledger_to_json(gateway.ledger());
    fc::write_manifest(m, out_path + ".manifest.json");
}

int run_select(const SharedArgs& args, const std::string& pool_path) {
    fc::AppConfig cfg = resolve_config(args);
    auto gateway_ptr = make_gateway(cfg, args);
    fc::JudgeGateway& gateway = *gateway_ptr;
    fc::RunManifest manifest = start_manifest("select", cfg);
    manifest.input_digests["pool"] = fc::file_digest(pool_path);

    fc::PoolLoadResult pool =
        fc::load_pool_file(pool_path, cfg.estimation.segmentation);
    for (const auto& err : pool.errors)
        std::cerr << "warning: skipped malformed pool record (" << err << ")\n";

    std::ofstream out(args.out_path);
    if (!out) throw fc::ConfigError("cannot write report: " + args.out_path);
    int failures = 0;
    for (const auto& entry : pool.entries) {
        try {
            fc::SelectionResult result =
                fc::select_best(entry.question, entry.candidates, cfg.estimation, gateway);
            if (result.fallback_used)
                std::cerr << "warning: question " << entry.question.id
                          << ": all candidates pruned; falling back to the first candidate\n";
            for (const auto& report : result.ranking) {
                json line = fc::report_to_json(report);
                line["question_id"] = entry.question.id;
                out << line.dump() << "\n";
            }
            out << fc::selection_to_json(entry.question, result, cfg.estimation,
                                         &entry.candidates, /*include_ranking=*/false)
                       .dump()
                << "\n";
        } catch (const fc::Error& e) {
            std::cerr << "error: question " << entry.question.id << ": " << e.what() << "\n";
            ++failures;
        }
    }
    finish_manifest(manifest, gateway, args.out_path);
    return (failures > 0 || !pool.errors.empty()) ? 2 : 0;
}

int run_denoise(const SharedArgs& args, const std::string& exemplar_path,
                const std::string& testset_path, const std::string& clean_out) {
    fc::AppConfig cfg = resolve_config(args);
    auto gateway_ptr = make_gateway(cfg, args);
    fc::JudgeGateway& gateway = *gateway_ptr;
    fc::RunManifest manifest = start_manifest("denoise", cfg);
    manifest.input_digests["exemplars"] = fc::file_digest(exemplar_path);
    manifest.input_digests["testset"] = fc::file_digest(testset_path);

    fc::PromptSet noisy;
    noisy.origin = fc::PromptSetOrigin::Noisy;
    noisy.exemplars =
        fc::load_exemplar_file(exemplar_path, cfg.estimation.segmentation);
    if (noisy.exemplars.empty())
        std::cerr << "warning: empty exemplar file; evaluating zero-shot\n";

    fc::PromptSet clean = fc::filter_prompt_set(noisy, cfg.denoise, gateway);
    const int kept = static_cast<int>(clean.exemplars.size());
    const int dropped = static_cast<int>(noisy.exemplars.size()) - kept;

    const std::string clean_path =
        clean_out.empty() ? args.out_path + ".clean.jsonl" : clean_out;
    {
        std::ofstream cf(clean_path);
        for (const auto& ex : clean.exemplars) {
            json line{{"id", ex.question.id},
                      {"question", ex.question.text},
                      {"cot", ex.chain.joined()},
                      {"answer", ex.label.canonical},
                      {"task_kind", fc::to_string(ex.question.task_kind)}};
            if (ex.report) line["R"] = ex.report->R;
            cf << line.dump() << "\n";
        }
    }

    std::vector<fc::Question> testset = fc::load_testset_file(testset_path);
    fc::AccuracyMetrics metrics = fc::evaluate_accuracy(testset, clean, gateway);

    std::ofstream out(args.out_path);
    if (!out) throw fc::ConfigError("cannot write metrics: " + args.out_path);
    json mj = fc::metrics_to_json(metrics, kept, dropped, cfg.denoise.tau);
    mj["clean_set"] = clean_path;
    out << mj.dump(2) << "\n";

    finish_manifest(manifest, gateway, args.out_path);
    return 0;
}

int run_icl(const SharedArgs& args, const std::string& report_path,
            const std::string& testset_path, const std::vector<int>& exemplar_counts) {
    fc::AppConfig cfg = resolve_config(args);
    auto gateway_ptr = make_gateway(cfg, args);
    fc::JudgeGateway& gateway = *gateway_ptr;
    fc::RunManifest manifest = start_manifest("icl", cfg);
    manifest.input_digests["report"] = fc::file_digest(report_path);
    manifest.input_digests["testset"] = fc::file_digest(testset_path);

    // Selected chains become exemplars in report order.
    std::vector<fc::Exemplar> selected;
    {
        std::ifstream in(report_path);
        if (!in) throw fc::ConfigError("cannot open report: " + report_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            if (j.value("record", "") != "selection") continue;
            if (j["best"].is_null() || !j.contains("best_chain")) continue;
            fc::Exemplar ex;
            ex.question.id = j.at("question_id").get<std::string>();
            ex.question.text = j.at("question_text").get<std::string>();
            ex.question.task_kind =
                fc::task_kind_from_string(j.value("task_kind", "math-numeric"));
            ex.chain = fc::chain_from_steps(j["best_chain"].get<std::vector<std::string>>());
            ex.label = fc::canonicalize_answer(j.at("best_answer").get<std::string>(),
                                               ex.question.task_kind);
            selected.push_back(std::move(ex));
        }
    }

    std::vector<fc::Question> testset = fc::load_testset_file(testset_path);
    for (int e_count : exemplar_counts) {
        if (static_cast<int>(selected.size()) < e_count)
            throw fc::InsufficientExemplars(
                "report holds " + std::to_string(selected.size()) +
                " selections, need " + std::to_string(e_count));
        fc::PromptSet pset;
        pset.origin = fc::PromptSetOrigin::Selected;
        pset.exemplars.assign(selected.begin(), selected.begin() + e_count);
        fc::AccuracyMetrics metrics = fc::evaluate_accuracy(testset, pset, gateway);
        const std::string path = exemplar_counts.size() == 1
                                     ? args.out_path
                                     : args.out_path + ".E" + std::to_string(e_count);
        std::ofstream out(path);
        if (!out) throw fc::ConfigError("cannot write metrics: " + path);
        json mj = fc::metrics_to_json(metrics, e_count, 0, 0.0);
        mj["E"] = e_count;
        out << mj.dump(2) << "\n";
    }
    finish_manifest(manifest, gateway, args.out_path);
    return 0;
}

void print_report_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fc::ConfigError("cannot open report: " + path);
    std::printf("%-14s %-14s %8s %8s %8s  %s\n", "question", "candidate", "C", "F", "R",
                "flags");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (j.value("record", "") == "score") {
            const double c = j["C"].is_null() ? 1.0 : j["C"].value("C", 0.0);
            const double f = j["F"].is_null() ? 0.0 : j["F"].value("F", 0.0);
            std::string flags;
            if (j.value("pruned", false)) flags = "pruned";
            for (const auto& fl : j.value("flags", std::vector<std::string>{}))
                flags += (flags.empty() ? "" : ",") + fl;
            std::printf("%-14s %-14s %8.4f %8.4f %8.4f  %s\n",
                        j.value("question_id", "-").c_str(),
                        j.value("candidate_id", "-").c_str(), c, f, j.value("R", 0.0),
                        flags.c_str());
        } else if (j.value("record", "") == "selection") {
            std::printf("%-14s -> best=%s R_max=%.4f%s (nominal lightweight=%d)\n",
                        j.value("question_id", "-").c_str(),
                        j["best"].is_null() ? "none" : j["best"].get<std::string>().c_str(),
                        j.value("R_max", 0.0),
                        j.value("fallback_used", false) ? " [fallback]" : "",
                        j["nominal_requests_per_query"].value("lightweight", 7));
        }
    }
}

void compare_reports(const std::string& a, const std::string& b) {
    auto load_best = [](const std::string& path) {
        std::map<std::string, std::string> best;
        std::ifstream in(path);
        if (!in) throw fc::ConfigError("cannot open report: " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            if (j.value("record", "") != "selection") continue;
            best[j.value("question_id", "")] =
                j["best"].is_null() ? "none" : j["best"].get<std::string>();
        }
        return best;
    };
    auto ba = load_best(a);
    auto bb = load_best(b);
    int agree = 0, total = 0;
    for (const auto& [qid, sel] : ba) {
        auto it = bb.find(qid);
        if (it == bb.end()) continue;
        ++total;
        if (it->second == sel) {
            ++agree;
        } else {
            std::printf("%-14s %s != %s\n", qid.c_str(), sel.c_str(), it->second.c_str());
        }
    }
    std::printf("agreement: %d/%d\n", agree, total);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tandem CoT reliability scoring (consistency x faithfulness)"};
    app.require_subcommand(1);

    SharedArgs sel_args, den_args, icl_args;
    std::string pool_path, exemplar_path, den_testset, icl_report, icl_testset, clean_out;
    std::vector<int> exemplar_counts{5};
    std::vector<std::string> report_files;

    CLI::App* sel = app.add_subcommand("select", "Score a candidate pool and pick the best chain per question");
    sel->add_option("--pool", pool_path, "Pool JSONL")->required();
    add_shared_flags(sel, sel_args);

    CLI::App* den = app.add_subcommand("denoise", "Filter noisy demonstrations, then evaluate with the clean set");
    den->add_option("--exemplars", exemplar_path, "Exemplar JSONL")->required();
    den->add_option("--testset", den_testset, "Test set JSONL")->required();
    den->add_option("--clean-out", clean_out, "Path for the filtered exemplar file");
    add_shared_flags(den, den_args);

    CLI::App* icl = app.add_subcommand("icl", "Evaluate selected chains as few-shot exemplars");
    icl->add_option("--report", icl_report, "Selection report from `facte select`")->required();
    icl->add_option("--testset", icl_testset, "Test set JSONL")->required();
    icl->add_option("-E,--exemplars", exemplar_counts, "Exemplar counts (e.g. -E 5 10 15)");
    add_shared_flags(icl, icl_args);

    CLI::App* rep = app.add_subcommand("report", "Pretty-print or compare report files");
    rep->add_option("files", report_files, "Report file(s)")->expected(1, 2);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sel->parsed()) return run_select(sel_args, pool_path);
        if (den->parsed()) return run_denoise(den_args, exemplar_path, den_testset, clean_out);
        if (icl->parsed()) return run_icl(icl_args, icl_report, icl_testset, exemplar_counts);
        if (rep->parsed()) {
            if (report_files.size() == 2)
                compare_reports(report_files[0], report_files[1]);
            else
                print_report_table(report_files[0]);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
