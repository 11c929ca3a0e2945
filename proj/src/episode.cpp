#include "episode.hpp"

#include <cmath>
#include <stdexcept>

namespace hiplan::smdp {

double option_reward(const std::vector<mpc::PrimitiveTransition>& transitions, double gamma) {
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in [0, 1]");
    double total = 0.0;
    double discount = 1.0;
    for (const mpc::PrimitiveTransition& tr : transitions) {
        total += discount * tr.reward;
        discount *= gamma;
    }
    return total;
}

EpisodeTrace run_episode(const policy::PolicyParams& params, const env::Environment& env,
                         const mpc::MpcConfig& mpc_cfg, const EpisodeLimits& limits,
                         std::uint64_t seed) {
    if (limits.max_options < 1) throw std::invalid_argument("max_options must be >= 1");

    Rng rng = make_rng(seed);
    EpisodeTrace trace;
    env::RawState state = env.reset(seed);
    double episode_discount = 1.0;  // gamma^{T_k}

    for (int k = 0; k < limits.max_options; ++k) {
        policy::SampledOption sampled =
            policy::sample_option(state, params, env.state_dim(), rng);
        mpc::OptionExecution exec =
            mpc::run_option(state, sampled.option.concrete, mpc_cfg, env, rng);

        OptionTransition tr;
        tr.state = state;
        tr.option = sampled.option;
        tr.log_prob = sampled.log_prob;
        tr.elapsed_steps = exec.elapsed_steps;
        tr.reward = option_reward(exec.transitions, limits.gamma);
        tr.next_state = exec.end_state;
        tr.terminal = exec.terminal;
        tr.primitives = std::move(exec.transitions);

        trace.total_return += episode_discount * tr.reward;
        episode_discount *= std::pow(limits.gamma, tr.elapsed_steps);
        state = exec.end_state;
        trace.transitions.push_back(std::move(tr));
        if (trace.transitions.back().terminal) break;
    }
    return trace;
}

}  // namespace hiplan::smdp
