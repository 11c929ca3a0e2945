#include "environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hiplan::env {

std::vector<StepOutcome> Environment::simulate(
    const RawState& s, const std::vector<PrimitiveAction>& actions) const {
    std::vector<StepOutcome> out;
    out.reserve(actions.size());
    const RawState* cur = &s;
    for (PrimitiveAction a : actions) {
        out.push_back(step(*cur, a));
        cur = &out.back().next_state;
        if (out.back().terminal) break;
    }
    return out;
}

RawState MountainCar::reset(std::uint64_t seed) const {
    double pos = p_.start_position;
    if (p_.start_jitter) {
        Rng rng = make_rng(seed);
        pos = uniform_in(rng, p_.jitter_lo, p_.jitter_hi);
    }
    return RawState{pos, 0.0};
}

void MountainCar::step(const RawState& s, PrimitiveAction a, StepOutcome& out) const {
    if (s.size() != 2) throw std::invalid_argument("mountain car state must have 2 dimensions");
    if (a < -1.0 || a > 1.0 || !std::isfinite(a)) {
        throw std::invalid_argument("action out of range [-1, 1]");
    }
    double position = s[0];
    double velocity = s[1];

    velocity += a * p_.force - p_.gravity * std::cos(3.0 * position);
    velocity = std::clamp(velocity, -p_.max_speed, p_.max_speed);
    position += velocity;
    if (position <= p_.min_position) {
        // Inelastic left wall.
        position = p_.min_position;
        velocity = 0.0;
    } else if (position > p_.max_position) {
        position = p_.max_position;
    }

    out.next_state.assign({position, velocity});
    out.terminal = position > p_.goal_position;
    out.reward = out.terminal ? 100.0 : -a;
}

}  // namespace hiplan::env
