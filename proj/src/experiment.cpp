#include "experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "episode.hpp"
#include "knowledge_base.hpp"
#include "policy.hpp"

namespace fs = std::filesystem;

namespace hiplan::exp {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double to_double(const std::string& value, const std::string& key) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::runtime_error("config key '" + key + "': bad number '" + value + "'");
    }
    return out;
}

int to_int(const std::string& value, const std::string& key) {
    double d = to_double(value, key);
    if (d != static_cast<long long>(d)) {
        throw std::runtime_error("config key '" + key + "': expected integer, got '" + value +
                                 "'");
    }
    return static_cast<int>(d);
}

bool to_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw std::runtime_error("config key '" + key + "': expected boolean, got '" + value + "'");
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct ArmSpec {
    Arm arm;
    const char* name;
};
constexpr ArmSpec kArms[] = {
    {Arm::Baseline, "Baseline"},     {Arm::NoPenalty, "NoPenalty"},
    {Arm::Proposed, "Proposed"},     {Arm::NoRefining, "NoRefining"},
    {Arm::RefiningHP, "RefiningHP"}, {Arm::RefiningHPSGF, "RefiningHPSGF"},
};

}  // namespace

Arm parse_arm(const std::string& name) {
    for (const ArmSpec& s : kArms) {
        if (name == s.name) return s.arm;
    }
    std::string known;
    for (const ArmSpec& s : kArms) known += std::string(known.empty() ? "" : ", ") + s.name;
    throw std::runtime_error("unknown arm '" + name + "' (expected one of: " + known + ")");
}

std::string arm_name(Arm arm) {
    for (const ArmSpec& s : kArms) {
        if (s.arm == arm) return s.name;
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (domain_file.empty()) throw std::runtime_error("config: domain_file is required");
    if (grounding_file.empty()) throw std::runtime_error("config: grounding_file is required");
    if (output_dir.empty()) throw std::runtime_error("config: output_dir must not be empty");
    if (!(sigma_init > 0.0)) throw std::runtime_error("config: sigma_init must be > 0");
    if (!(sigma_min > 0.0)) throw std::runtime_error("config: sigma_min must be > 0");
    if (plan_max_len == 0) throw std::runtime_error("config: plan_max_len must be >= 1");
    if (init_mu_source == InitMuSource::IntervalMean && !init_mu.empty()) {
        throw std::runtime_error(
            "config: init_mu.* overrides require init_mu_source=override");
    }
    refine.validate();
    mpc.validate();
    if (env.start_jitter && !(env.jitter_lo < env.jitter_hi)) {
        throw std::runtime_error("config: start jitter range is empty");
    }
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;

    auto resolve = [&base_dir](const std::string& path) {
        fs::path p(path);
        if (p.is_absolute() || base_dir.empty()) return path;
        return (fs::path(base_dir) / p).lexically_normal().string();
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));

        if (key == "domain_file") cfg.domain_file = resolve(value);
        else if (key == "grounding_file") cfg.grounding_file = resolve(value);
        else if (key == "arm") cfg.arm = parse_arm(value);
        else if (key == "master_seed") cfg.master_seed = static_cast<std::uint64_t>(
                 std::strtoull(value.c_str(), nullptr, 10));
        else if (key == "output_dir") cfg.output_dir = resolve(value);
        else if (key == "dump_traces") cfg.dump_traces = to_bool(value, key);
        else if (key == "val_in") cfg.val_in = to_double(value, key);
        else if (key == "val_nin") cfg.val_nin = to_double(value, key);
        else if (key == "sigma_init") cfg.sigma_init = to_double(value, key);
        else if (key == "sigma_min") cfg.sigma_min = to_double(value, key);
        else if (key == "plan_max_len") cfg.plan_max_len =
                 static_cast<std::size_t>(to_int(value, key));
        else if (key == "init_mu_source") {
            if (value == "interval-mean") cfg.init_mu_source = InitMuSource::IntervalMean;
            else if (value == "override") cfg.init_mu_source = InitMuSource::Override;
            else throw std::runtime_error("config: init_mu_source must be "
                                          "'interval-mean' or 'override'");
        }
        else if (key.rfind("init_mu.", 0) == 0) {
            cfg.init_mu[key.substr(8)] = to_double(value, key);
        }
        else if (key.rfind("init_sigma.", 0) == 0) {
            cfg.init_sigma[key.substr(11)] = to_double(value, key);
        }
        else if (key == "alpha") cfg.refine.alpha = to_double(value, key);
        else if (key == "gamma") cfg.refine.gamma = to_double(value, key);
        else if (key == "episodes_per_epoch") cfg.refine.episodes_per_epoch = to_int(value, key);
        else if (key == "epochs") cfg.refine.epochs = to_int(value, key);
        else if (key == "lambda_sgf") cfg.refine.lambda_sgf = to_double(value, key);
        else if (key == "lambda_hp") cfg.refine.lambda_hp = to_double(value, key);
        else if (key == "update_mode") {
            if (value == "all-steps") cfg.refine.update_mode = refine::UpdateMode::AllSteps;
            else if (value == "first-step") cfg.refine.update_mode = refine::UpdateMode::FirstStep;
            else throw std::runtime_error("config: update_mode must be "
                                          "'all-steps' or 'first-step'");
        }
        else if (key == "threads") cfg.refine.threads = to_int(value, key);
        else if (key == "max_options") cfg.refine.max_options = to_int(value, key);
        else if (key == "mpc_horizon") cfg.mpc.horizon = to_int(value, key);
        else if (key == "mpc_candidates") cfg.mpc.candidates = to_int(value, key);
        else if (key == "mpc_max_steps") cfg.mpc.max_steps = to_int(value, key);
        else if (key == "mpc_tolerance") cfg.mpc.tolerance = to_double(value, key);
        else if (key == "env_force") cfg.env.force = to_double(value, key);
        else if (key == "env_gravity") cfg.env.gravity = to_double(value, key);
        else if (key == "env_min_position") cfg.env.min_position = to_double(value, key);
        else if (key == "env_max_position") cfg.env.max_position = to_double(value, key);
        else if (key == "env_max_speed") cfg.env.max_speed = to_double(value, key);
        else if (key == "env_goal_position") cfg.env.goal_position = to_double(value, key);
        else if (key == "env_start_position") cfg.env.start_position = to_double(value, key);
        else if (key == "env_start_jitter") cfg.env.start_jitter = to_bool(value, key);
        else if (key == "env_jitter_lo") cfg.env.jitter_lo = to_double(value, key);
        else if (key == "env_jitter_hi") cfg.env.jitter_hi = to_double(value, key);
        else throw std::runtime_error("config line " + std::to_string(line_no) +
                                      ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    fs::path p(path);
    return parse_config(kb::read_file(path), p.parent_path().string());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "domain_file=" << cfg.domain_file << "\n";
    out << "grounding_file=" << cfg.grounding_file << "\n";
    out << "arm=" << arm_name(cfg.arm) << "\n";
    out << "master_seed=" << cfg.master_seed << "\n";
    out << "output_dir=" << cfg.output_dir << "\n";
    out << "dump_traces=" << (cfg.dump_traces ? "true" : "false") << "\n";
    out << "val_in=" << format_double(cfg.val_in) << "\n";
    out << "val_nin=" << format_double(cfg.val_nin) << "\n";
    out << "sigma_init=" << format_double(cfg.sigma_init) << "\n";
    out << "sigma_min=" << format_double(cfg.sigma_min) << "\n";
    out << "plan_max_len=" << cfg.plan_max_len << "\n";
    out << "init_mu_source="
        << (cfg.init_mu_source == InitMuSource::IntervalMean ? "interval-mean" : "override")
        << "\n";
    for (const auto& [sym, v] : cfg.init_mu) {
        out << "init_mu." << sym << "=" << format_double(v) << "\n";
    }
    for (const auto& [sym, v] : cfg.init_sigma) {
        out << "init_sigma." << sym << "=" << format_double(v) << "\n";
    }
    out << "alpha=" << format_double(cfg.refine.alpha) << "\n";
    out << "gamma=" << format_double(cfg.refine.gamma) << "\n";
    out << "episodes_per_epoch=" << cfg.refine.episodes_per_epoch << "\n";
    out << "epochs=" << cfg.refine.epochs << "\n";
    out << "lambda_sgf=" << format_double(cfg.refine.lambda_sgf) << "\n";
    out << "lambda_hp=" << format_double(cfg.refine.lambda_hp) << "\n";
    out << "update_mode="
        << (cfg.refine.update_mode == refine::UpdateMode::AllSteps ? "all-steps" : "first-step")
        << "\n";
    out << "threads=" << cfg.refine.threads << "\n";
    out << "max_options=" << cfg.refine.max_options << "\n";
    out << "mpc_horizon=" << cfg.mpc.horizon << "\n";
    out << "mpc_candidates=" << cfg.mpc.candidates << "\n";
    out << "mpc_max_steps=" << cfg.mpc.max_steps << "\n";
    out << "mpc_tolerance=" << format_double(cfg.mpc.tolerance) << "\n";
    out << "env_force=" << format_double(cfg.env.force) << "\n";
    out << "env_gravity=" << format_double(cfg.env.gravity) << "\n";
    out << "env_min_position=" << format_double(cfg.env.min_position) << "\n";
    out << "env_max_position=" << format_double(cfg.env.max_position) << "\n";
    out << "env_max_speed=" << format_double(cfg.env.max_speed) << "\n";
    out << "env_goal_position=" << format_double(cfg.env.goal_position) << "\n";
    out << "env_start_position=" << format_double(cfg.env.start_position) << "\n";
    out << "env_start_jitter=" << (cfg.env.start_jitter ? "true" : "false") << "\n";
    out << "env_jitter_lo=" << format_double(cfg.env.jitter_lo) << "\n";
    out << "env_jitter_hi=" << format_double(cfg.env.jitter_hi) << "\n";
    return out.str();
}

refine::RefineConfig arm_refine_config(const ExperimentConfig& cfg) {
    refine::RefineConfig rc = cfg.refine;
    switch (cfg.arm) {
        case Arm::Baseline:
        case Arm::NoRefining:
            rc.freeze_sgf = true;
            rc.freeze_hp = true;
            break;
        case Arm::NoPenalty:
            rc.freeze_sgf = false;
            rc.freeze_hp = true;
            rc.lambda_sgf = 0.0;
            break;
        case Arm::Proposed:
            rc.freeze_sgf = false;
            rc.freeze_hp = true;
            break;
        case Arm::RefiningHP:
            rc.freeze_sgf = true;
            rc.freeze_hp = false;
            break;
        case Arm::RefiningHPSGF:
            rc.freeze_sgf = false;
            rc.freeze_hp = false;
            break;
    }
    return rc;
}

namespace {

struct PreparedRun {
    kb::KnowledgeBase knowledge;
    kb::GroundingTable grounding;
    env::MountainCar environment;
    policy::PolicyParams params;
    policy::Priors priors;
};

PreparedRun prepare(const ExperimentConfig& cfg) {
    cfg.validate();
    PreparedRun run;
    run.knowledge = kb::parse_domain(kb::read_file(cfg.domain_file));
    run.grounding = kb::parse_grounding(kb::read_file(cfg.grounding_file));
    run.environment = env::MountainCar(cfg.env);

    policy::InitOptions opts;
    opts.val_in = cfg.val_in;
    opts.val_nin = cfg.val_nin;
    opts.sigma_init = cfg.sigma_init;
    opts.sigma_min = cfg.sigma_min;
    run.params = policy::init_policy(run.knowledge, run.grounding, opts, run.priors);

    for (std::size_t i = 0; i < run.params.size(); ++i) {
        if (run.params.dim[i] < 0 ||
            static_cast<std::size_t>(run.params.dim[i]) >= run.environment.state_dim()) {
            throw std::runtime_error("symbol '" + run.params.table.symbol(i).name() +
                                     "' grounds dimension " +
                                     std::to_string(run.params.dim[i]) +
                                     " outside the environment state");
        }
    }

    auto lookup = [&run](const std::string& name) {
        return run.params.table.index(kb::parse_symbol_name(name));
    };
    if (cfg.init_mu_source == InitMuSource::Override) {
        for (const auto& [name, value] : cfg.init_mu) {
            std::size_t i = lookup(name);
            // The override replaces the prior itself; mu always starts at
            // the prior mean.
            run.priors.mu_prior[i] = value;
            run.params.mu[i] = value;
        }
    }
    for (const auto& [name, value] : cfg.init_sigma) {
        if (!(value > 0.0)) {
            throw std::runtime_error("init_sigma." + name + " must be > 0");
        }
        run.params.sigma[lookup(name)] = value;
    }
    run.params.clamp_sigma();

    run.priors.lambda_sgf = cfg.refine.lambda_sgf;
    run.priors.lambda_hp = cfg.refine.lambda_hp;
    return run;
}

std::string plan_text(const PreparedRun& run, const ExperimentConfig& cfg,
                      const policy::PolicyParams& params) {
    env::RawState start = run.environment.reset(cfg.master_seed);
    std::vector<double> pa = policy::abstract_probs(start, params);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pa.size(); ++i) {
        if (pa[i] > pa[best]) best = i;
    }
    std::vector<kb::Symbol> plan = policy::extract_plan(params.table.symbol(best),
                                                        run.knowledge.goal, params,
                                                        cfg.plan_max_len);
    std::string out;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        out += (i == 0 ? "" : " -> ") + plan[i].name();
    }
    out += "\n";
    return out;
}

std::string state_fields(const env::RawState& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += (i == 0 ? "" : ",") + std::string(format_double(s[i]));
    }
    return out;
}

std::string trace_dump(const ExperimentConfig& cfg, const PreparedRun& run,
                       const policy::PolicyParams& params) {
    std::ostringstream out;
    out << "episode\toption\ts\ts_h\tg_h\tg\tt\treward\ts_next\tterminal\n";
    refine::RefineConfig rc = arm_refine_config(cfg);
    smdp::EpisodeLimits limits{rc.max_options, rc.gamma};
    for (int e = 0; e < cfg.refine.episodes_per_epoch; ++e) {
        std::uint64_t seed =
            derive_seed(cfg.master_seed, static_cast<std::uint64_t>(cfg.refine.epochs),
                        static_cast<std::uint64_t>(e));
        smdp::EpisodeTrace trace =
            smdp::run_episode(params, run.environment, cfg.mpc, limits, seed);
        for (std::size_t k = 0; k < trace.transitions.size(); ++k) {
            const smdp::OptionTransition& tr = trace.transitions[k];
            std::size_t sub = params.table.index(tr.option.subgoal);
            out << e << "\t" << k << "\t" << state_fields(tr.state) << "\t"
                << tr.option.current.name() << "\t" << tr.option.subgoal.name() << "\t"
                << format_double(
                       tr.option.concrete.target[static_cast<std::size_t>(params.dim[sub])])
                << "\t" << tr.elapsed_steps << "\t" << format_double(tr.reward) << "\t"
                << state_fields(tr.next_state) << "\t" << (tr.terminal ? 1 : 0) << "\n";
        }
    }
    return out.str();
}

}  // namespace

RunResult run_arm(const ExperimentConfig& cfg) {
    PreparedRun run = prepare(cfg);

    fs::create_directories(cfg.output_dir);
    fs::path dir(cfg.output_dir);

    kb::write_file((dir / "config.txt").string(), serialize_config(cfg));
    kb::write_file((dir / "params_initial.txt").string(), policy::dump_params(run.params));
    kb::write_file((dir / "plan_initial.txt").string(), plan_text(run, cfg, run.params));

    refine::RefineConfig rc = arm_refine_config(cfg);
    refine::TrainResult trained = refine::train(run.params, run.priors, run.environment,
                                                cfg.mpc, rc, cfg.master_seed);

    kb::write_file((dir / "metrics.csv").string(), refine::metrics_csv(trained.metrics));
    kb::write_file((dir / "params_final.txt").string(), policy::dump_params(trained.params));
    kb::write_file((dir / "plan_final.txt").string(), plan_text(run, cfg, trained.params));

    std::ostringstream manifest;
    manifest << "arm=" << arm_name(cfg.arm) << "\n";
    manifest << "master_seed=" << cfg.master_seed << "\n";
    manifest << "epochs=" << cfg.refine.epochs << "\n";
    manifest << "episodes_per_epoch=" << cfg.refine.episodes_per_epoch << "\n";
    kb::write_file((dir / "manifest.txt").string(), manifest.str());

    if (cfg.dump_traces) {
        kb::write_file((dir / "traces.tsv").string(), trace_dump(cfg, run, trained.params));
    }
    return {cfg.output_dir, trained.metrics};
}

namespace {

struct RunSummary {
    std::string arm;
    double trailing_mean = 0.0;
};

RunSummary read_run(const std::string& dir, std::size_t window) {
    fs::path p(dir);
    RunSummary summary;

    std::string manifest = kb::read_file((p / "manifest.txt").string());
    std::istringstream min(manifest);
    std::string line;
    while (std::getline(min, line)) {
        if (line.rfind("arm=", 0) == 0) summary.arm = line.substr(4);
    }
    if (summary.arm.empty()) {
        throw std::runtime_error("manifest in '" + dir + "' has no arm entry");
    }

    std::string csv = kb::read_file((p / "metrics.csv").string());
    std::istringstream cin(csv);
    std::vector<double> returns;
    bool header = true;
    int line_no = 0;
    while (std::getline(cin, line)) {
        ++line_no;
        if (header) {
            header = false;
            if (line.rfind("epoch,avg_return", 0) != 0) {
                throw std::runtime_error("metrics.csv in '" + dir + "' has unexpected header");
            }
            continue;
        }
        if (trim(line).empty()) continue;
        std::size_t c1 = line.find(',');
        std::size_t c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw std::runtime_error("metrics.csv in '" + dir + "': bad row at line " +
                                     std::to_string(line_no));
        }
        returns.push_back(to_double(line.substr(c1 + 1, c2 - c1 - 1), "avg_return"));
    }
    if (returns.empty()) {
        throw std::runtime_error("metrics.csv in '" + dir + "' has no data rows");
    }

    std::size_t n = std::min(window, returns.size());
    double sum = 0.0;
    for (std::size_t i = returns.size() - n; i < returns.size(); ++i) sum += returns[i];
    summary.trailing_mean = sum / static_cast<double>(n);
    return summary;
}

}  // namespace

std::string compare(const std::vector<std::string>& run_dirs, std::size_t window) {
    if (run_dirs.empty()) throw std::runtime_error("compare: no run directories given");
    if (window == 0) throw std::runtime_error("compare: window must be >= 1");

    std::vector<std::string> arm_order;
    std::map<std::string, std::vector<double>> by_arm;
    for (const std::string& dir : run_dirs) {
        RunSummary s = read_run(dir, window);
        if (by_arm.find(s.arm) == by_arm.end()) arm_order.push_back(s.arm);
        by_arm[s.arm].push_back(s.trailing_mean);
    }

    std::ostringstream out;
    out << "arm,runs,mean_return,stderr\n";
    for (const std::string& arm : arm_order) {
        const std::vector<double>& means = by_arm[arm];
        double mean = 0.0;
        for (double m : means) mean += m;
        mean /= static_cast<double>(means.size());
        double se = 0.0;
        if (means.size() > 1) {
            double var = 0.0;
            for (double m : means) var += (m - mean) * (m - mean);
            var /= static_cast<double>(means.size() - 1);
            se = std::sqrt(var / static_cast<double>(means.size()));
        }
        out << arm << "," << means.size() << "," << format_double(mean) << ","
            << format_double(se) << "\n";
    }
    return out.str();
}

std::string initial_plan(const ExperimentConfig& cfg) {
    PreparedRun run = prepare(cfg);
    return plan_text(run, cfg, run.params);
}

}  // namespace hiplan::exp
