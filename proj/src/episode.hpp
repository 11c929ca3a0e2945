#pragma once

#include <cstdint>
#include <vector>

#include "environment.hpp"
#include "mpc.hpp"
#include "policy.hpp"

namespace hiplan::smdp {

// One executed option: the sampled tuple, its log-probability, the elapsed
// primitive steps and their discounted reward, and the arrival state. The
// primitive trace is kept so the reward can be re-derived.
struct OptionTransition {
    env::RawState state;
    policy::Option option;
    double log_prob = 0.0;
    int elapsed_steps = 0;
    double reward = 0.0;  // discounted within the option, gamma^i per step
    env::RawState next_state;
    bool terminal = false;
    std::vector<mpc::PrimitiveTransition> primitives;
};

struct EpisodeTrace {
    std::vector<OptionTransition> transitions;
    double total_return = 0.0;  // sum_k gamma^{T_k} * reward_k
};

struct EpisodeLimits {
    int max_options = 20;
    double gamma = 0.99;
};

// Discounted sum of the primitive rewards inside one option; the discount
// index restarts at 0 for each option.
double option_reward(const std::vector<mpc::PrimitiveTransition>& transitions, double gamma);

// Step 1-5 loop: abstract, plan, concretize, execute, repeat until the
// environment terminates or the option budget runs out.
EpisodeTrace run_episode(const policy::PolicyParams& params, const env::Environment& env,
                         const mpc::MpcConfig& mpc_cfg, const EpisodeLimits& limits,
                         std::uint64_t seed);

}  // namespace hiplan::smdp
