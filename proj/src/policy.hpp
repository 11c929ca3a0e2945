#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knowledge_base.hpp"
#include "mpc.hpp"
#include "rng.hpp"

namespace hiplan::policy {

// Fixed enumeration of the symbol set S_h. Index order is the knowledge
// base's declaration order (predicate-major), which also breaks argmax ties.
class SymbolTable {
public:
    SymbolTable() = default;
    explicit SymbolTable(std::vector<kb::Symbol> symbols);

    std::size_t size() const { return symbols_.size(); }
    const kb::Symbol& symbol(std::size_t i) const { return symbols_[i]; }
    const std::vector<kb::Symbol>& symbols() const { return symbols_; }

    // Throws std::out_of_range for unknown symbols.
    std::size_t index(const kb::Symbol& s) const;
    bool contains(const kb::Symbol& s) const;

    friend bool operator==(const SymbolTable&, const SymbolTable&) = default;

private:
    std::vector<kb::Symbol> symbols_;
};

// The refinable parameter vector theta = theta_sgf || theta_hp:
//   per symbol: mu, sigma (shared between abstraction and concretization)
//   per goal symbol g: weights[g] over the current-symbol one-hot index.
// `dim[i]` is the raw dimension symbol i grounds, from the grounding table.
struct PolicyParams {
    SymbolTable table;
    std::vector<int> dim;
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<double> weights;  // n*n, row-major by goal symbol
    double sigma_min = 0.01;

    std::size_t size() const { return table.size(); }
    double& w(std::size_t goal_sym, std::size_t cur_sym) {
        return weights[goal_sym * size() + cur_sym];
    }
    double w(std::size_t goal_sym, std::size_t cur_sym) const {
        return weights[goal_sym * size() + cur_sym];
    }

    void clamp_sigma();
};

// Gradient (or update direction) with the same layout as PolicyParams.
struct ParamGrad {
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<double> weights;

    explicit ParamGrad(std::size_t n = 0)
        : mu(n, 0.0), sigma(n, 0.0), weights(n * n, 0.0) {}

    void add_scaled(const ParamGrad& other, double scale);
    void scale(double factor);
};

// Hyper-parameters of the parameter priors fitted from the knowledge bases,
// plus the penalty coefficients applied to their score.
struct Priors {
    std::vector<double> mu_prior;
    std::vector<double> weight_prior;  // n*n, row-major by goal symbol
    double lambda_sgf = 1.0;
    double lambda_hp = 0.01;
};

struct Option {
    kb::Symbol current;   // s_h
    kb::Symbol subgoal;   // g_h
    mpc::ConcreteSubgoal concrete;  // g with mask
};

// --- prior fitting -------------------------------------------------------

// Interval-mean prior for each symbol's mu; initial mu equals the prior.
// Fills params.dim/mu and priors.mu_prior; sigma is left untouched.
void fit_sgf_prior(const kb::GroundingTable& table, PolicyParams& params, Priors& priors);

// Knowledge-base prior for the planner weights: every entry val_nin, then
// val_in at (effect row, precondition column) for each operator. Initial
// weights equal the prior.
void fit_hp_prior(const kb::KnowledgeBase& kb, double val_in, double val_nin,
                  PolicyParams& params, Priors& priors);

// Convenience: build a fully initialized policy from the two knowledge bases.
struct InitOptions {
    double val_in = -0.02;
    double val_nin = -1.3;
    double sigma_init = 0.4;
    double sigma_min = 0.01;
};
PolicyParams init_policy(const kb::KnowledgeBase& kb, const kb::GroundingTable& table,
                         const InitOptions& opts, Priors& priors);

// --- the factorized policy ----------------------------------------------

// P(s_h | s): normalized likelihood of each symbol's 1-D normal density,
// evaluated at the symbol's grounded dimension. Computed in log space.
std::vector<double> abstract_probs(const env::RawState& s, const PolicyParams& p);

// P(g_h | s_h): softmax over goal-symbol logits w[g][index(s_h)].
std::vector<double> hp_probs(const kb::Symbol& current, const PolicyParams& p);

// P(g | g_h): 1-D normal on the sub-goal symbol's grounded dimension; all
// other dimensions masked out.
mpc::ConcreteSubgoal concretize_sample(const kb::Symbol& subgoal, const PolicyParams& p,
                                       std::size_t state_dim, Rng& rng);
double concretize_logpdf(const mpc::ConcreteSubgoal& g, const kb::Symbol& subgoal,
                         const PolicyParams& p);

struct SampledOption {
    Option option;
    double log_prob = 0.0;
};
SampledOption sample_option(const env::RawState& s, const PolicyParams& p,
                            std::size_t state_dim, Rng& rng);

// Log-probability of a given option under the policy (the quantity whose
// gradient score() returns).
double option_log_prob(const env::RawState& s, const Option& option, const PolicyParams& p);

// Analytic gradient of option_log_prob with respect to every parameter.
ParamGrad score(const env::RawState& s, const Option& option, const PolicyParams& p);

// Gradient of the log-prior: lambda_sgf*(mu'-mu) on mu, lambda_hp*(w'-w) on
// weights, zero on sigma (uniform prior).
ParamGrad prior_grad(const PolicyParams& p, const Priors& priors);

// Greedy argmax rollout of hp_probs from `start`, stopping at `goal` or
// max_len symbols. Ties resolve to the lowest symbol index.
std::vector<kb::Symbol> extract_plan(const kb::Symbol& start, const kb::Symbol& goal,
                                     const PolicyParams& p, std::size_t max_len);

// --- persistence ----------------------------------------------------------

// Human-readable parameter table; load(dump(p)) round-trips exactly.
std::string dump_params(const PolicyParams& p);
PolicyParams load_params(const std::string& text);

}  // namespace hiplan::policy
