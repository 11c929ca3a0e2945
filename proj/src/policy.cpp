#include "policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hiplan::policy {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

double normal_logpdf(double x, double mu, double sigma) {
    double z = (x - mu) / sigma;
    return -std::log(sigma) - 0.5 * kLog2Pi - 0.5 * z * z;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double_field(const std::string& s, const std::string& context) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::runtime_error("bad numeric field '" + s + "' in " + context);
    }
    return out;
}

}  // namespace

SymbolTable::SymbolTable(std::vector<kb::Symbol> symbols) : symbols_(std::move(symbols)) {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        for (std::size_t j = i + 1; j < symbols_.size(); ++j) {
            if (symbols_[i] == symbols_[j]) {
                throw std::invalid_argument("duplicate symbol '" + symbols_[i].name() + "'");
            }
        }
    }
}

std::size_t SymbolTable::index(const kb::Symbol& s) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (symbols_[i] == s) return i;
    }
    throw std::out_of_range("unknown symbol '" + s.name() + "'");
}

bool SymbolTable::contains(const kb::Symbol& s) const {
    return std::find(symbols_.begin(), symbols_.end(), s) != symbols_.end();
}

void PolicyParams::clamp_sigma() {
    for (double& s : sigma) s = std::max(s, sigma_min);
}

void ParamGrad::add_scaled(const ParamGrad& other, double scale) {
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += scale * other.mu[i];
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] += scale * other.sigma[i];
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] += scale * other.weights[i];
}

void ParamGrad::scale(double factor) {
    for (double& v : mu) v *= factor;
    for (double& v : sigma) v *= factor;
    for (double& v : weights) v *= factor;
}

void fit_sgf_prior(const kb::GroundingTable& table, PolicyParams& params, Priors& priors) {
    const std::size_t n = params.table.size();
    params.dim.assign(n, 0);
    params.mu.assign(n, 0.0);
    priors.mu_prior.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const kb::SymbolInterval* entry = table.find(params.table.symbol(i));
        if (entry == nullptr) {
            throw std::invalid_argument("grounding table has no entry for '" +
                                        params.table.symbol(i).name() + "'");
        }
        params.dim[i] = entry->dimension;
        priors.mu_prior[i] = entry->midpoint();
        params.mu[i] = priors.mu_prior[i];
    }
}

void fit_hp_prior(const kb::KnowledgeBase& kb, double val_in, double val_nin,
                  PolicyParams& params, Priors& priors) {
    const std::size_t n = params.table.size();
    priors.weight_prior.assign(n * n, val_nin);
    for (const kb::Operator& op : kb.operators) {
        std::size_t pre = params.table.index(op.precondition);
        std::size_t eff = params.table.index(op.effect);
        priors.weight_prior[eff * n + pre] = val_in;
    }
    params.weights = priors.weight_prior;
}

PolicyParams init_policy(const kb::KnowledgeBase& kb, const kb::GroundingTable& table,
                         const InitOptions& opts, Priors& priors) {
    kb::validate_pair(kb, table);
    PolicyParams params;
    params.table = SymbolTable(kb.ground_symbols());
    params.sigma_min = opts.sigma_min;
    fit_sgf_prior(table, params, priors);
    fit_hp_prior(kb, opts.val_in, opts.val_nin, params, priors);
    params.sigma.assign(params.size(), opts.sigma_init);
    params.clamp_sigma();
    return params;
}

std::vector<double> abstract_probs(const env::RawState& s, const PolicyParams& p) {
    const std::size_t n = p.size();
    std::vector<double> logd(n);
    double max_logd = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        logd[i] = normal_logpdf(s.at(static_cast<std::size_t>(p.dim[i])), p.mu[i], p.sigma[i]);
        max_logd = std::max(max_logd, logd[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        logd[i] = std::exp(logd[i] - max_logd);
        total += logd[i];
    }
    for (double& v : logd) v /= total;
    return logd;
}

std::vector<double> hp_probs(const kb::Symbol& current, const PolicyParams& p) {
    const std::size_t n = p.size();
    const std::size_t cur = p.table.index(current);
    std::vector<double> probs(n);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < n; ++g) max_logit = std::max(max_logit, p.w(g, cur));
    double total = 0.0;
    for (std::size_t g = 0; g < n; ++g) {
        probs[g] = std::exp(p.w(g, cur) - max_logit);
        total += probs[g];
    }
    for (double& v : probs) v /= total;
    return probs;
}

mpc::ConcreteSubgoal concretize_sample(const kb::Symbol& subgoal, const PolicyParams& p,
                                       std::size_t state_dim, Rng& rng) {
    const std::size_t i = p.table.index(subgoal);
    mpc::ConcreteSubgoal g;
    g.target.assign(state_dim, 0.0);
    g.mask.assign(state_dim, false);
    const auto d = static_cast<std::size_t>(p.dim[i]);
    if (d >= state_dim) {
        throw std::out_of_range("symbol '" + subgoal.name() +
                                "' grounds dimension " + std::to_string(p.dim[i]) +
                                " outside the state");
    }
    g.target[d] = p.mu[i] + p.sigma[i] * normal01(rng);
    g.mask[d] = true;
    return g;
}

double concretize_logpdf(const mpc::ConcreteSubgoal& g, const kb::Symbol& subgoal,
                         const PolicyParams& p) {
    const std::size_t i = p.table.index(subgoal);
    return normal_logpdf(g.target.at(static_cast<std::size_t>(p.dim[i])), p.mu[i], p.sigma[i]);
}

SampledOption sample_option(const env::RawState& s, const PolicyParams& p,
                            std::size_t state_dim, Rng& rng) {
    std::vector<double> pa = abstract_probs(s, p);
    std::size_t cur = sample_index(rng, pa);
    std::vector<double> ph = hp_probs(p.table.symbol(cur), p);
    std::size_t sub = sample_index(rng, ph);

    SampledOption out;
    out.option.current = p.table.symbol(cur);
    out.option.subgoal = p.table.symbol(sub);
    out.option.concrete = concretize_sample(out.option.subgoal, p, state_dim, rng);
    out.log_prob = std::log(pa[cur]) + std::log(ph[sub]) +
                   concretize_logpdf(out.option.concrete, out.option.subgoal, p);
    return out;
}

double option_log_prob(const env::RawState& s, const Option& option, const PolicyParams& p) {
    std::vector<double> pa = abstract_probs(s, p);
    std::vector<double> ph = hp_probs(option.current, p);
    return std::log(pa[p.table.index(option.current)]) +
           std::log(ph[p.table.index(option.subgoal)]) +
           concretize_logpdf(option.concrete, option.subgoal, p);
}

ParamGrad score(const env::RawState& s, const Option& option, const PolicyParams& p) {
    const std::size_t n = p.size();
    ParamGrad grad(n);
    const std::size_t cur = p.table.index(option.current);
    const std::size_t sub = p.table.index(option.subgoal);

    // Abstraction: normalized likelihood couples every symbol's (mu, sigma).
    std::vector<double> pa = abstract_probs(s, p);
    for (std::size_t k = 0; k < n; ++k) {
        double x = s.at(static_cast<std::size_t>(p.dim[k]));
        double resid = (k == cur ? 1.0 : 0.0) - pa[k];
        double z = (x - p.mu[k]) / p.sigma[k];
        grad.mu[k] += resid * z / p.sigma[k];
        grad.sigma[k] += resid * (z * z - 1.0) / p.sigma[k];
    }

    // High-level softmax: only the current symbol's logit column moves.
    std::vector<double> ph = hp_probs(option.current, p);
    for (std::size_t g = 0; g < n; ++g) {
        grad.weights[g * n + cur] += (g == sub ? 1.0 : 0.0) - ph[g];
    }

    // Concretization: Gaussian score at the sampled sub-goal value.
    double gv = option.concrete.target.at(static_cast<std::size_t>(p.dim[sub]));
    double z = (gv - p.mu[sub]) / p.sigma[sub];
    grad.mu[sub] += z / p.sigma[sub];
    grad.sigma[sub] += (z * z - 1.0) / p.sigma[sub];

    return grad;
}

ParamGrad prior_grad(const PolicyParams& p, const Priors& priors) {
    const std::size_t n = p.size();
    ParamGrad grad(n);
    for (std::size_t i = 0; i < n; ++i) {
        grad.mu[i] = priors.lambda_sgf * (priors.mu_prior[i] - p.mu[i]);
    }
    for (std::size_t i = 0; i < n * n; ++i) {
        grad.weights[i] = priors.lambda_hp * (priors.weight_prior[i] - p.weights[i]);
    }
    return grad;
}

std::vector<kb::Symbol> extract_plan(const kb::Symbol& start, const kb::Symbol& goal,
                                     const PolicyParams& p, std::size_t max_len) {
    std::vector<kb::Symbol> plan;
    if (max_len == 0) return plan;
    plan.push_back(start);
    while (plan.size() < max_len && !(plan.back() == goal)) {
        std::vector<double> probs = hp_probs(plan.back(), p);
        std::size_t best = 0;
        for (std::size_t g = 1; g < probs.size(); ++g) {
            if (probs[g] > probs[best]) best = g;
        }
        plan.push_back(p.table.symbol(best));
    }
    return plan;
}

std::string dump_params(const PolicyParams& p) {
    std::ostringstream out;
    out << "; symbol grounding: name, dimension, mu, sigma\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << "sgf\t" << p.table.symbol(i).name() << "\t" << p.dim[i] << "\t"
            << format_double(p.mu[i]) << "\t" << format_double(p.sigma[i]) << "\n";
    }
    out << "; planner weights: goal symbol, then one weight per current-symbol index\n";
    for (std::size_t g = 0; g < p.size(); ++g) {
        out << "hp\t" << p.table.symbol(g).name();
        for (std::size_t i = 0; i < p.size(); ++i) out << "\t" << format_double(p.w(g, i));
        out << "\n";
    }
    return out.str();
}

PolicyParams load_params(const std::string& text) {
    std::vector<kb::Symbol> symbols;
    std::vector<int> dims;
    std::vector<double> mus;
    std::vector<double> sigmas;
    std::vector<std::pair<kb::Symbol, std::vector<double>>> rows;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == ';' || line[first] == '#') continue;

        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            std::size_t tab = line.find('\t', pos);
            fields.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        std::string context = "parameter line " + std::to_string(line_no);
        if (fields[0] == "sgf") {
            if (fields.size() != 5) throw std::runtime_error("bad sgf row at " + context);
            symbols.push_back(kb::parse_symbol_name(fields[1], line_no));
            dims.push_back(static_cast<int>(parse_double_field(fields[2], context)));
            mus.push_back(parse_double_field(fields[3], context));
            sigmas.push_back(parse_double_field(fields[4], context));
        } else if (fields[0] == "hp") {
            if (fields.size() < 3) throw std::runtime_error("bad hp row at " + context);
            std::vector<double> w;
            for (std::size_t i = 2; i < fields.size(); ++i) {
                w.push_back(parse_double_field(fields[i], context));
            }
            rows.emplace_back(kb::parse_symbol_name(fields[1], line_no), std::move(w));
        } else {
            throw std::runtime_error("unknown row kind '" + fields[0] + "' at " + context);
        }
    }

    PolicyParams p;
    p.table = SymbolTable(symbols);
    p.dim = std::move(dims);
    p.mu = std::move(mus);
    p.sigma = std::move(sigmas);
    const std::size_t n = p.size();
    if (rows.size() != n) {
        throw std::runtime_error("parameter table has " + std::to_string(rows.size()) +
                                 " hp rows for " + std::to_string(n) + " symbols");
    }
    p.weights.assign(n * n, 0.0);
    for (auto& [sym, w] : rows) {
        if (w.size() != n) {
            throw std::runtime_error("hp row '" + sym.name() + "' has " +
                                     std::to_string(w.size()) + " weights, expected " +
                                     std::to_string(n));
        }
        std::size_t g = p.table.index(sym);
        for (std::size_t i = 0; i < n; ++i) p.w(g, i) = w[i];
    }
    return p;
}

}  // namespace hiplan::policy
