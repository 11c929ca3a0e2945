#pragma once

#include <cstdint>
#include <vector>

#include "rng.hpp"

namespace hiplan::env {

using RawState = std::vector<double>;
using PrimitiveAction = double;

struct StepOutcome {
    RawState next_state;
    double reward = 0.0;
    bool terminal = false;
};

// Deterministic transition function plus a seeded start-state generator.
// step() is pure in (s, a); rollouts can share one instance across threads.
class Environment {
public:
    virtual ~Environment() = default;

    virtual std::size_t state_dim() const = 0;
    virtual RawState reset(std::uint64_t seed) const = 0;

    // In-place variant so hot loops can reuse the outcome buffer.
    virtual void step(const RawState& s, PrimitiveAction a, StepOutcome& out) const = 0;

    StepOutcome step(const RawState& s, PrimitiveAction a) const {
        StepOutcome out;
        step(s, a, out);
        return out;
    }

    std::vector<StepOutcome> simulate(const RawState& s,
                                      const std::vector<PrimitiveAction>& actions) const;
};

struct MountainCarParams {
    double force = 0.0015;
    double gravity = 0.0025;
    double min_position = -1.2;
    double max_position = 0.8;
    double max_speed = 0.07;
    double goal_position = 0.6;   // terminal when position exceeds this
    double start_position = -0.5;
    bool start_jitter = false;    // uniform start position instead of fixed
    double jitter_lo = -0.6;
    double jitter_hi = -0.4;
};

// Continuous-action Mountain Car. State is [position, velocity], action is
// the car's acceleration in [-1, 1]. Reaching past goal_position pays 100;
// every other step pays the negated action value.
class MountainCar final : public Environment {
public:
    MountainCar() = default;
    explicit MountainCar(const MountainCarParams& params) : p_(params) {}

    const MountainCarParams& params() const { return p_; }

    std::size_t state_dim() const override { return 2; }
    RawState reset(std::uint64_t seed) const override;
    void step(const RawState& s, PrimitiveAction a, StepOutcome& out) const override;
    using Environment::step;

private:
    MountainCarParams p_;
};

}  // namespace hiplan::env
