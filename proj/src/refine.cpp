#include "refine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hiplan::refine {

void RefineConfig::validate() const {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in [0, 1]");
    if (episodes_per_epoch < 1) throw std::invalid_argument("episodes_per_epoch must be >= 1");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (lambda_sgf < 0.0 || lambda_hp < 0.0) {
        throw std::invalid_argument("penalty coefficients must be >= 0");
    }
    if (max_options < 1) throw std::invalid_argument("max_options must be >= 1");
}

std::vector<double> returns_to_go(const smdp::EpisodeTrace& trace, double gamma) {
    const std::size_t n = trace.transitions.size();
    std::vector<double> g(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        const smdp::OptionTransition& tr = trace.transitions[i];
        double tail = (i + 1 < n) ? std::pow(gamma, tr.elapsed_steps) * g[i + 1] : 0.0;
        g[i] = tr.reward + tail;
    }
    return g;
}

policy::PolicyParams reinforce_update(const std::vector<smdp::EpisodeTrace>& traces,
                                      const policy::PolicyParams& params,
                                      const policy::Priors& priors, const RefineConfig& cfg) {
    cfg.validate();
    if (traces.empty()) throw std::invalid_argument("reinforce_update needs at least one trace");

    const std::size_t n = params.size();
    policy::ParamGrad grad(n);
    for (const smdp::EpisodeTrace& trace : traces) {
        std::vector<double> g = returns_to_go(trace, cfg.gamma);
        std::size_t steps =
            cfg.update_mode == UpdateMode::FirstStep ? std::min<std::size_t>(1, g.size())
                                                     : g.size();
        for (std::size_t t = 0; t < steps; ++t) {
            const smdp::OptionTransition& tr = trace.transitions[t];
            grad.add_scaled(policy::score(tr.state, tr.option, params), g[t]);
        }
    }
    grad.scale(1.0 / static_cast<double>(traces.size()));
    grad.add_scaled(policy::prior_grad(params, priors), 1.0);

    policy::PolicyParams next = params;
    if (!cfg.freeze_sgf) {
        for (std::size_t i = 0; i < n; ++i) {
            next.mu[i] += cfg.alpha * grad.mu[i];
            next.sigma[i] += cfg.alpha * grad.sigma[i];
        }
        next.clamp_sigma();
    }
    if (!cfg.freeze_hp) {
        for (std::size_t i = 0; i < n * n; ++i) {
            next.weights[i] += cfg.alpha * grad.weights[i];
        }
    }
    return next;
}

std::pair<double, double> divergence(const policy::PolicyParams& p,
                                     const policy::PolicyParams& p0) {
    if (p.size() != p0.size() || p.weights.size() != p0.weights.size()) {
        throw std::invalid_argument("parameter shapes differ");
    }
    double mu_sq = 0.0;
    for (std::size_t i = 0; i < p.mu.size(); ++i) {
        double d = p.mu[i] - p0.mu[i];
        mu_sq += d * d;
    }
    double w_sq = 0.0;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
        double d = p.weights[i] - p0.weights[i];
        w_sq += d * d;
    }
    return {std::sqrt(mu_sq), std::sqrt(w_sq)};
}

TrainResult train(const policy::PolicyParams& initial, const policy::Priors& priors,
                  const env::Environment& env, const mpc::MpcConfig& mpc_cfg,
                  const RefineConfig& cfg, std::uint64_t master_seed) {
    cfg.validate();
    mpc_cfg.validate();

    TrainResult result;
    result.params = initial;
    result.metrics.reserve(static_cast<std::size_t>(cfg.epochs));

    const int n_episodes = cfg.episodes_per_epoch;
    int workers = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, n_episodes));

    smdp::EpisodeLimits limits{cfg.max_options, cfg.gamma};
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<smdp::EpisodeTrace> traces(static_cast<std::size_t>(n_episodes));
        auto roll = [&](int begin, int stride) {
            for (int e = begin; e < n_episodes; e += stride) {
                std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(epoch),
                                                 static_cast<std::uint64_t>(e));
                traces[static_cast<std::size_t>(e)] =
                    smdp::run_episode(result.params, env, mpc_cfg, limits, seed);
            }
        };
        if (workers == 1) {
            roll(0, 1);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) pool.emplace_back(roll, w, workers);
            for (std::thread& t : pool) t.join();
        }

        double sum_return = 0.0;
        for (const smdp::EpisodeTrace& t : traces) sum_return += t.total_return;
        auto [div_sgf, div_hp] = divergence(result.params, initial);
        result.metrics.push_back(
            {epoch, sum_return / static_cast<double>(n_episodes), div_sgf, div_hp});

        result.params = reinforce_update(traces, result.params, priors, cfg);
    }
    return result;
}

std::string metrics_csv(const std::vector<EpochMetrics>& metrics) {
    std::ostringstream out;
    out << "epoch,avg_return,div_sgf,div_hp\n";
    char buf[128];
    for (const EpochMetrics& m : metrics) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", m.epoch, m.avg_return,
                      m.div_sgf, m.div_hp);
        out << buf;
    }
    return out.str();
}

}  // namespace hiplan::refine
