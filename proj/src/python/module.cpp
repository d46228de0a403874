// Python bindings for the core scoring operations. The JSON-heavy surfaces
// (reports, selections) cross the boundary as JSON strings so Python callers
// can use plain dicts without a converter dependency.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "facte/denoiser.hpp"
#include "facte/pool.hpp"
#include "facte/selector.hpp"

namespace py = pybind11;
using namespace facte;

namespace {

Question make_question(const std::string& id, const std::string& text,
                       const std::string& task_kind,
                       const std::optional<std::string>& gold_answer) {
    Question q;
    q.id = id;
    q.text = text;
    q.task_kind = task_kind_from_string(task_kind);
    if (gold_answer) q.gold_answer = canonicalize_answer(*gold_answer, q.task_kind);
    return q;
}

Candidate make_candidate(const std::string& id, const std::vector<std::string>& steps,
                         const std::string& answer, const std::string& task_kind) {
    Candidate c;
    c.candidate_id = id;
    c.chain = chain_from_steps(steps);
    c.answer = canonicalize_answer(answer, task_kind_from_string(task_kind));
    return c;
}

EstimationConfig make_estimation_config(int n_trials, const std::string& mode,
                                        const std::string& ablation,
                                        const std::string& perturbations,
                                        std::uint64_t seed, bool fixed_positions,
                                        double trial_temperature) {
    EstimationConfig cfg;
    cfg.n_trials = n_trials;
    cfg.mode = faith_mode_from_string(mode);
    cfg.ablation = ablation_from_string(ablation);
    cfg.perturbations = perturbation_policy_from_string(perturbations);
    cfg.seed = seed;
    cfg.fixed_positions = fixed_positions;
    cfg.trial_temperature = trial_temperature;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_facte, m) {
    m.doc() = "CoT reliability scoring: tandem consistency/faithfulness estimation";

    py::class_<Question>(m, "Question")
        .def(py::init(&make_question), py::arg("id"), py::arg("text"),
             py::arg("task_kind") = "math-numeric", py::arg("gold_answer") = py::none())
        .def_readonly("id", &Question::id)
        .def_readonly("text", &Question::text);

    py::class_<Candidate>(m, "Candidate")
        .def(py::init(&make_candidate), py::arg("id"), py::arg("steps"),
             py::arg("answer"), py::arg("task_kind") = "math-numeric")
        .def_readonly("candidate_id", &Candidate::candidate_id)
        .def_property_readonly("answer",
                               [](const Candidate& c) { return c.answer.canonical; });

    py::class_<EstimationConfig>(m, "EstimationConfig")
        .def(py::init(&make_estimation_config), py::arg("n_trials") = 3,
             py::arg("mode") = "lightweight", py::arg("ablation") = "full",
             py::arg("perturbations") = "one-per-split", py::arg("seed") = 0,
             py::arg("fixed_positions") = false, py::arg("trial_temperature") = 0.0)
        .def_readwrite("n_trials", &EstimationConfig::n_trials)
        .def_readwrite("seed", &EstimationConfig::seed);

    py::class_<JudgeGateway>(m, "JudgeGateway")
        .def(py::init([](const std::string& backend, const std::string& endpoint_url,
                         const std::string& model_id, const std::string& rules_json,
                         std::uint64_t seed) {
                 BackendConfig cfg;
                 cfg.backend = backend == "wire" ? BackendKind::Wire : BackendKind::Scripted;
                 cfg.endpoint_url = endpoint_url;
                 if (!model_id.empty()) cfg.model_id = model_id;
                 cfg.validate();
                 auto gw = std::make_unique<JudgeGateway>(cfg, seed);
                 if (!rules_json.empty())
                     gw->set_scripted_oracle(ScriptedOracle::from_json_text(rules_json, seed));
                 return gw;
             }),
             py::arg("backend") = "scripted", py::arg("endpoint_url") = "",
             py::arg("model_id") = "", py::arg("rules_json") = "", py::arg("seed") = 0)
        .def("attach_cache_file", &JudgeGateway::attach_cache_file)
        .def("attach_transcript_file", &JudgeGateway::attach_transcript_file)
        .def("ledger", [](const JudgeGateway& gw) {
            return ledger_to_json(gw.ledger()).dump();
        });

    m.def(
        "score_candidate",
        [](const Question& q, const Candidate& cand, const EstimationConfig& cfg,
           JudgeGateway& gw) {
            return report_to_json(score_candidate(q, cand, cfg, gw)).dump();
        },
        py::arg("question"), py::arg("candidate"), py::arg("config"), py::arg("gateway"),
        "Score one candidate; returns the score report as a JSON string.");

    m.def(
        "select_best",
        [](const Question& q, const std::vector<Candidate>& pool,
           const EstimationConfig& cfg, JudgeGateway& gw) {
            auto result = facte::select_best(q, pool, cfg, gw);
            return selection_to_json(q, result, cfg, &pool).dump();
        },
        py::arg("question"), py::arg("candidates"), py::arg("config"), py::arg("gateway"),
        "Rank a candidate pool by R = C * F; returns the selection record as JSON.");

    m.def(
        "canonicalize_answer",
        [](const std::string& raw, const std::string& task_kind) {
            return canonicalize_answer(raw, task_kind_from_string(task_kind)).canonical;
        },
        py::arg("raw"), py::arg("task_kind") = "math-numeric");

    m.def(
        "answers_equal",
        [](const std::string& a, const std::string& b, const std::string& task_kind) {
            const TaskKind kind = task_kind_from_string(task_kind);
            return canonicalize_answer(a, kind).equals(canonicalize_answer(b, kind));
        },
        py::arg("a"), py::arg("b"), py::arg("task_kind") = "math-numeric");

    m.def("segment_chain", [](const std::string& raw, const std::string& policy) {
        auto chain = segment_chain(raw, segmentation_policy_from_string(policy));
        std::vector<std::string> steps;
        for (const auto& s : chain.steps) steps.push_back(s.text);
        return steps;
    }, py::arg("raw_text"), py::arg("policy") = "explicit-markers");

    m.attr("__version__") = "0.1.0";
}
