#pragma once

#include <cstdint>
#include <string>

#include "facte/chain.hpp"
#include "facte/gateway.hpp"

namespace facte {

enum class FaithMode { Standard, Lightweight };
enum class Ablation { Full, ConsistencyOnly, FaithfulnessOnly };
enum class PerturbationPolicy { OnePerSplit, All };

std::string to_string(FaithMode m);
std::string to_string(Ablation a);
std::string to_string(PerturbationPolicy p);
FaithMode faith_mode_from_string(const std::string& s);
Ablation ablation_from_string(const std::string& s);
PerturbationPolicy perturbation_policy_from_string(const std::string& s);

struct EstimationConfig {
    int n_trials = 3;
    FaithMode mode = FaithMode::Lightweight;
    Ablation ablation = Ablation::Full;
    PerturbationPolicy perturbations = PerturbationPolicy::OnePerSplit;
    std::uint64_t seed = 0;
    bool fixed_positions = false;
    double trial_temperature = 0.0;
    SegmentationPolicy segmentation = SegmentationPolicy::ExplicitMarkers;

    void validate() const;
};

struct DenoiseConfig {
    double tau = 0.5;
    EstimationConfig estimation;

    void validate() const;
};

/// Full tool configuration: [backend], [estimation], [denoise] sections of the
/// config file, each field overridable by a CLI flag.
struct AppConfig {
    BackendConfig backend;
    EstimationConfig estimation;
    DenoiseConfig denoise;
};

/// Parses a sectioned key = value config file. Unknown keys are rejected.
AppConfig load_config_file(const std::string& path);
AppConfig parse_config_text(const std::string& text);

}  // namespace facte
