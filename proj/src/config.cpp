#include "facte/config.hpp"

#include <fstream>
#include <sstream>

#include "facte/errors.hpp"

namespace facte {

std::string to_string(FaithMode m) {
    return m == FaithMode::Standard ? "standard" : "lightweight";
}

std::string to_string(Ablation a) {
    switch (a) {
        case Ablation::Full: return "full";
        case Ablation::ConsistencyOnly: return "consistency-only";
        case Ablation::FaithfulnessOnly: return "faithfulness-only";
    }
    return "full";
}

std::string to_string(PerturbationPolicy p) {
    return p == PerturbationPolicy::All ? "all" : "one-per-split";
}

FaithMode faith_mode_from_string(const std::string& s) {
    if (s == "standard") return FaithMode::Standard;
    if (s == "lightweight") return FaithMode::Lightweight;
    throw ConfigError("unknown mode: " + s);
}

Ablation ablation_from_string(const std::string& s) {
    if (s == "full") return Ablation::Full;
    if (s == "consistency-only" || s == "c-only") return Ablation::ConsistencyOnly;
    if (s == "faithfulness-only" || s == "f-only") return Ablation::FaithfulnessOnly;
    throw ConfigError("unknown ablation: " + s);
}

PerturbationPolicy perturbation_policy_from_string(const std::string& s) {
    if (s == "one-per-split") return PerturbationPolicy::OnePerSplit;
    if (s == "all") return PerturbationPolicy::All;
    throw ConfigError("unknown perturbation policy: " + s);
}

void EstimationConfig::validate() const {
    if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
    if (trial_temperature < 0) throw ConfigError("trial_temperature must be >= 0");
}

void DenoiseConfig::validate() const {
    if (tau < 0.0 || tau > 1.0) throw ConfigError("tau must lie in [0, 1]");
    estimation.validate();
}

static std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

static bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("not a boolean: " + v);
}

AppConfig parse_config_text(const std::string& text) {
    AppConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            if (section != "backend" && section != "estimation" && section != "denoise")
                throw ConfigError("unknown config section [" + section + "]");
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " is not key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = strip_quotes(trim(t.substr(eq + 1)));
        if (section == "backend") {
            if (key == "backend")
                cfg.backend.backend = val == "wire" ? BackendKind::Wire : BackendKind::Scripted;
            else if (key == "endpoint_url") cfg.backend.endpoint_url = val;
            else if (key == "model_id") cfg.backend.model_id = val;
            else if (key == "temperature") cfg.backend.temperature = std::stod(val);
            else if (key == "request_timeout_ms") cfg.backend.request_timeout_ms = std::stoi(val);
            else if (key == "max_retries") cfg.backend.max_retries = std::stoi(val);
            else if (key == "backoff_base_ms") cfg.backend.backoff_base_ms = std::stoi(val);
            else if (key == "concurrency_limit") cfg.backend.concurrency_limit = std::stoi(val);
            else throw ConfigError("unknown [backend] key: " + key);
        } else if (section == "estimation") {
            if (key == "n_trials") cfg.estimation.n_trials = std::stoi(val);
            else if (key == "mode") cfg.estimation.mode = faith_mode_from_string(val);
            else if (key == "ablation") cfg.estimation.ablation = ablation_from_string(val);
            else if (key == "perturbations")
                cfg.estimation.perturbations = perturbation_policy_from_string(val);
            else if (key == "seed") cfg.estimation.seed = std::stoull(val);
            else if (key == "fixed_positions") cfg.estimation.fixed_positions = parse_bool(val);
            else if (key == "trial_temperature") cfg.estimation.trial_temperature = std::stod(val);
            else if (key == "segmentation")
                cfg.estimation.segmentation = segmentation_policy_from_string(val);
            else throw ConfigError("unknown [estimation] key: " + key);
        } else if (section == "denoise") {
            if (key == "tau") cfg.denoise.tau = std::stod(val);
            else throw ConfigError("unknown [denoise] key: " + key);
        } else {
            throw ConfigError("key outside any section: " + key);
        }
    }
    cfg.denoise.estimation = cfg.estimation;
    return cfg;
}

AppConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace facte
