#pragma once

#include <cstdint>
#include <vector>

#include "environment.hpp"
#include "rng.hpp"

namespace hiplan::mpc {

// Raw-valued sub-goal with a per-dimension mask; unmasked dimensions are
// "don't care" (the '*' of the planner's concretization step).
struct ConcreteSubgoal {
    std::vector<double> target;
    std::vector<bool> mask;
};

struct MpcConfig {
    int horizon = 10;       // lookahead steps per candidate
    int candidates = 200;   // random action sequences per replan
    int max_steps = 20;     // primitive-step budget for one option
    double tolerance = 0.05;  // per-dimension goal radius

    void validate() const;
};

// True iff every masked dimension of s is within tol of the target.
bool achieved(const env::RawState& s, const ConcreteSubgoal& g, double tol);

// One replanning step of random-shooting MPC: samples candidate action
// sequences uniformly over [-1,1]^horizon, rolls each through the simulator,
// and returns the first action of the lowest-cost candidate. A candidate's
// cost is the terminal masked distance to the target, or a large negative
// bonus if the rollout reaches the sub-goal (earlier is better). Ties keep
// the lowest candidate index, so the result is a pure function of the rng
// state.
env::PrimitiveAction plan_action(const env::RawState& s, const ConcreteSubgoal& g,
                                 const MpcConfig& cfg, const env::Environment& env, Rng& rng);

struct PrimitiveTransition {
    env::RawState state;
    env::PrimitiveAction action = 0.0;
    double reward = 0.0;
};

struct OptionExecution {
    std::vector<PrimitiveTransition> transitions;
    env::RawState end_state;
    int elapsed_steps = 0;
    bool achieved = false;
    bool terminal = false;  // environment terminal, not sub-goal achievement
};

// Drive the environment toward g, replanning every step, until the sub-goal
// is achieved, the step budget runs out, or the environment terminates.
OptionExecution run_option(const env::RawState& s0, const ConcreteSubgoal& g,
                           const MpcConfig& cfg, const env::Environment& env, Rng& rng);

}  // namespace hiplan::mpc
