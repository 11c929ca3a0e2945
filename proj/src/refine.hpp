#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "episode.hpp"
#include "policy.hpp"

namespace hiplan::refine {

enum class UpdateMode {
    FirstStep,  // score only the episode's first option, scaled by the full return
    AllSteps,   // score every option, scaled by its discounted return-to-go
};

struct RefineConfig {
    double alpha = 1e-3;
    double gamma = 0.99;
    int episodes_per_epoch = 10;
    int epochs = 200;
    double lambda_sgf = 1.0;
    double lambda_hp = 0.01;
    UpdateMode update_mode = UpdateMode::AllSteps;
    bool freeze_sgf = false;
    bool freeze_hp = false;
    int max_options = 20;
    int threads = 0;  // rollout workers; 0 = hardware concurrency

    void validate() const;
};

struct EpochMetrics {
    int epoch = 0;
    double avg_return = 0.0;
    double div_sgf = 0.0;
    double div_hp = 0.0;
};

// Discounted return-to-go of each option transition; index 0 equals the
// trace's total return.
std::vector<double> returns_to_go(const smdp::EpisodeTrace& trace, double gamma);

// One penalized REINFORCE update from a batch of episodes: the batch-mean
// reinforcement term plus the penalty term, scaled by alpha. Frozen blocks
// stay fixed; sigma is clamped afterwards.
policy::PolicyParams reinforce_update(const std::vector<smdp::EpisodeTrace>& traces,
                                      const policy::PolicyParams& params,
                                      const policy::Priors& priors, const RefineConfig& cfg);

// Euclidean distances (mu block, weight block) between two parameter sets.
std::pair<double, double> divergence(const policy::PolicyParams& p,
                                     const policy::PolicyParams& p0);

// Full refinement loop. Per epoch: roll episodes from a fixed snapshot
// (optionally in parallel; results are reduced in episode order so the
// outcome is identical either way), record metrics, then update once.
// Episode seeds derive from (master_seed, epoch, episode index).
struct TrainResult {
    policy::PolicyParams params;
    std::vector<EpochMetrics> metrics;
};
TrainResult train(const policy::PolicyParams& initial, const policy::Priors& priors,
                  const env::Environment& env, const mpc::MpcConfig& mpc_cfg,
                  const RefineConfig& cfg, std::uint64_t master_seed);

// metrics.csv payload: header epoch,avg_return,div_sgf,div_hp.
std::string metrics_csv(const std::vector<EpochMetrics>& metrics);

}  // namespace hiplan::refine
