#include "mpc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hiplan::mpc {

namespace {

// Large enough that any achieving candidate beats any non-achieving one.
constexpr double kAchieveBonus = 1e6;

double masked_distance(const env::RawState& s, const ConcreteSubgoal& g) {
    double sq = 0.0;
    for (std::size_t d = 0; d < g.mask.size(); ++d) {
        if (!g.mask[d]) continue;
        double diff = s[d] - g.target[d];
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

void check_goal(const env::RawState& s, const ConcreteSubgoal& g) {
    if (g.target.size() != s.size() || g.mask.size() != s.size()) {
        throw std::invalid_argument("sub-goal arity does not match state dimension");
    }
    bool any = false;
    for (bool m : g.mask) any = any || m;
    if (!any) throw std::invalid_argument("sub-goal mask has no constrained dimension");
}

}  // namespace

void MpcConfig::validate() const {
    if (horizon < 1) throw std::invalid_argument("mpc horizon must be >= 1");
    if (candidates < 1) throw std::invalid_argument("mpc candidates must be >= 1");
    if (max_steps < 1) throw std::invalid_argument("mpc max_steps must be >= 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("mpc tolerance must be > 0");
}

bool achieved(const env::RawState& s, const ConcreteSubgoal& g, double tol) {
    for (std::size_t d = 0; d < g.mask.size(); ++d) {
        if (g.mask[d] && std::abs(s[d] - g.target[d]) > tol) return false;
    }
    return true;
}

env::PrimitiveAction plan_action(const env::RawState& s, const ConcreteSubgoal& g,
                                 const MpcConfig& cfg, const env::Environment& env, Rng& rng) {
    cfg.validate();
    check_goal(s, g);

    const bool at_goal_already = achieved(s, g, cfg.tolerance);
    double best_cost = std::numeric_limits<double>::infinity();
    env::PrimitiveAction best_first = 0.0;

    std::vector<env::PrimitiveAction> actions(static_cast<std::size_t>(cfg.horizon));
    env::RawState state;
    env::StepOutcome out;

    for (int c = 0; c < cfg.candidates; ++c) {
        // Fixed draw count per candidate keeps the stream layout independent
        // of early rollout termination.
        for (auto& a : actions) a = uniform_in(rng, -1.0, 1.0);

        int achieved_at = at_goal_already ? 0 : -1;
        state = s;
        if (achieved_at < 0) {
            for (int k = 0; k < cfg.horizon; ++k) {
                env.step(state, actions[static_cast<std::size_t>(k)], out);
                state = out.next_state;
                if (achieved(state, g, cfg.tolerance)) {
                    achieved_at = k + 1;
                    break;
                }
                if (out.terminal) break;
            }
        }

        double cost = achieved_at >= 0 ? -kAchieveBonus * (cfg.horizon + 1 - achieved_at)
                                       : masked_distance(state, g);
        if (cost < best_cost) {
            best_cost = cost;
            best_first = actions[0];
        }
    }
    return best_first;
}

OptionExecution run_option(const env::RawState& s0, const ConcreteSubgoal& g,
                           const MpcConfig& cfg, const env::Environment& env, Rng& rng) {
    cfg.validate();
    check_goal(s0, g);

    OptionExecution exec;
    exec.end_state = s0;
    env::StepOutcome out;
    while (exec.elapsed_steps < cfg.max_steps) {
        if (achieved(exec.end_state, g, cfg.tolerance)) {
            exec.achieved = true;
            break;
        }
        env::PrimitiveAction a = plan_action(exec.end_state, g, cfg, env, rng);
        env.step(exec.end_state, a, out);
        exec.transitions.push_back({exec.end_state, a, out.reward});
        exec.end_state = out.next_state;
        ++exec.elapsed_steps;
        if (out.terminal) {
            exec.terminal = true;
            break;
        }
    }
    if (!exec.terminal && achieved(exec.end_state, g, cfg.tolerance)) exec.achieved = true;
    return exec;
}

}  // namespace hiplan::mpc
