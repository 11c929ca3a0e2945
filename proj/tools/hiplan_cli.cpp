// Command-line front end. Deliberately uses only the public C API so it
// doubles as a smoke test for the shared library surface.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hiplan/hiplan.h"

namespace {

// Prints and frees an error message, returns the exit code.
int report(const char* what, char* err) {
    std::fprintf(stderr, "hiplan: %s: %s\n", what, err != nullptr ? err : "unknown error");
    hiplan_free(err);
    return 1;
}

struct ConfigHandle {
    hiplan_config_t* cfg = nullptr;
    ~ConfigHandle() { hiplan_config_free(cfg); }
};

int load_config(const std::string& path, ConfigHandle& handle) {
    char* err = nullptr;
    if (hiplan_config_load(path.c_str(), &handle.cfg, &err) != HIPLAN_OK) {
        return report("loading config", err);
    }
    return 0;
}

int set_key(ConfigHandle& handle, const std::string& key, const std::string& value) {
    char* err = nullptr;
    if (hiplan_config_set(handle.cfg, key.c_str(), value.c_str(), &err) != HIPLAN_OK) {
        return report("applying override", err);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical planner refinement"};
    app.require_subcommand(1);

    std::string config_path;
    std::string arm;
    std::string out_dir;
    std::int64_t seed = -1;
    bool dump_traces = false;

    CLI::App* run = app.add_subcommand("run", "run one experiment arm");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--arm", arm, "override the configured arm");
    run->add_option("--seed", seed, "override the master seed");
    run->add_option("--out", out_dir, "override the output directory");
    run->add_flag("--dump-traces", dump_traces, "write traces.tsv with post-training rollouts");

    std::vector<std::string> compare_dirs;
    std::size_t window = 50;
    CLI::App* compare = app.add_subcommand("compare", "summarize finished runs per arm");
    compare->add_option("dirs", compare_dirs, "run directories")->required()->expected(-1);
    compare->add_option("--window", window, "trailing epochs to average (default 50)");

    std::string plan_config;
    CLI::App* plan = app.add_subcommand("plan", "print the initial high-level plan");
    plan->add_option("--config", plan_config, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        ConfigHandle handle;
        if (int rc = load_config(config_path, handle); rc != 0) return rc;
        if (!arm.empty()) {
            if (int rc = set_key(handle, "arm", arm); rc != 0) return rc;
        }
        if (seed >= 0) {
            if (int rc = set_key(handle, "master_seed", std::to_string(seed)); rc != 0)
                return rc;
        }
        if (!out_dir.empty()) {
            if (int rc = set_key(handle, "output_dir", out_dir); rc != 0) return rc;
        }
        if (dump_traces) {
            if (int rc = set_key(handle, "dump_traces", "true"); rc != 0) return rc;
        }
        char* dir = nullptr;
        char* err = nullptr;
        if (hiplan_run(handle.cfg, &dir, &err) != HIPLAN_OK) return report("run failed", err);
        std::printf("run complete: %s\n", dir);
        hiplan_free(dir);
        return 0;
    }

    if (compare->parsed()) {
        std::vector<const char*> dirs;
        dirs.reserve(compare_dirs.size());
        for (const std::string& d : compare_dirs) dirs.push_back(d.c_str());
        char* csv = nullptr;
        char* err = nullptr;
        if (hiplan_compare(dirs.data(), dirs.size(), window, &csv, &err) != HIPLAN_OK) {
            return report("compare failed", err);
        }
        std::fputs(csv, stdout);
        hiplan_free(csv);
        return 0;
    }

    // plan
    ConfigHandle handle;
    if (int rc = load_config(plan_config, handle); rc != 0) return rc;
    char* text = nullptr;
    char* err = nullptr;
    if (hiplan_plan_initial(handle.cfg, &text, &err) != HIPLAN_OK) {
        return report("plan failed", err);
    }
    std::fputs(text, stdout);
    hiplan_free(text);
    return 0;
}
