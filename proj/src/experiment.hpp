#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "environment.hpp"
#include "refine.hpp"

namespace hiplan::exp {

// The six experiment arms. The first three refine the grounding functions
// against the full knowledge base; the last three target a degraded
// knowledge base and also refine the planner weights.
enum class Arm {
    Baseline,       // everything frozen
    NoPenalty,      // refine sgf, lambda_sgf forced to 0
    Proposed,       // refine sgf with the penalty
    NoRefining,     // everything frozen (degraded-KB counterpart of Baseline)
    RefiningHP,     // refine planner weights only
    RefiningHPSGF,  // refine grounding and planner weights
};

Arm parse_arm(const std::string& name);
std::string arm_name(Arm arm);

enum class InitMuSource { IntervalMean, Override };

// Flat key=value experiment configuration. Unknown keys are rejected.
struct ExperimentConfig {
    std::string domain_file;
    std::string grounding_file;
    Arm arm = Arm::Baseline;
    std::uint64_t master_seed = 1;
    std::string output_dir = "run";
    bool dump_traces = false;

    // policy initialization
    double val_in = -0.02;
    double val_nin = -1.3;
    double sigma_init = 0.4;
    double sigma_min = 0.01;
    InitMuSource init_mu_source = InitMuSource::IntervalMean;
    std::map<std::string, double> init_mu;     // per-symbol, with Override
    std::map<std::string, double> init_sigma;  // per-symbol, always allowed
    std::size_t plan_max_len = 8;

    refine::RefineConfig refine;  // freeze flags overwritten by the arm
    mpc::MpcConfig mpc;
    env::MountainCarParams env;

    void validate() const;
};

// Parse from text; relative file paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir);
ExperimentConfig load_config(const std::string& path);

// Re-parseable echo of every resolved setting.
std::string serialize_config(const ExperimentConfig& cfg);

// Arm semantics: which blocks are frozen and which penalty terms are live.
refine::RefineConfig arm_refine_config(const ExperimentConfig& cfg);

struct RunResult {
    std::string output_dir;
    std::vector<refine::EpochMetrics> metrics;
};

// Execute one arm end to end and persist the artifacts:
// metrics.csv, params_initial.txt, params_final.txt, plan_initial.txt,
// plan_final.txt, config.txt, manifest.txt, and traces.tsv when requested.
RunResult run_arm(const ExperimentConfig& cfg);

// Per-arm mean and standard error of avg_return over the trailing `window`
// epochs, pooled over the runs of each arm found in `run_dirs`. CSV output.
std::string compare(const std::vector<std::string>& run_dirs, std::size_t window = 50);

// Plan extracted from the initial (un-refined) parameters for `cfg`.
std::string initial_plan(const ExperimentConfig& cfg);

}  // namespace hiplan::exp
