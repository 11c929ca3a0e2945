#include "hiplan/hiplan.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "experiment.hpp"
#include "knowledge_base.hpp"
#include "policy.hpp"

using hiplan::kb::KnowledgeBase;
using hiplan::kb::GroundingTable;

struct hiplan_kb_t {
    KnowledgeBase kb;
};
struct hiplan_grounding_t {
    GroundingTable table;
};
struct hiplan_policy_t {
    hiplan::policy::PolicyParams params;
    hiplan::policy::Priors priors;
};
struct hiplan_config_t {
    hiplan::exp::ExperimentConfig cfg;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_err(char** err, const std::string& message) {
    if (err != nullptr) *err = dup_string(message);
}

// Runs `fn`, translating exceptions into a status code and message.
template <typename Fn>
hiplan_status guarded(char** err, Fn&& fn) {
    if (err != nullptr) *err = nullptr;
    try {
        return fn();
    } catch (const hiplan::kb::ParseError& e) {
        set_err(err, e.what());
        return HIPLAN_ERR_PARSE;
    } catch (const std::invalid_argument& e) {
        set_err(err, e.what());
        return HIPLAN_ERR_ARGUMENT;
    } catch (const std::out_of_range& e) {
        set_err(err, e.what());
        return HIPLAN_ERR_ARGUMENT;
    } catch (const std::exception& e) {
        std::string what = e.what();
        set_err(err, what);
        if (what.find("cannot open file") != std::string::npos ||
            what.find("cannot write file") != std::string::npos ||
            what.find("write failed") != std::string::npos) {
            return HIPLAN_ERR_IO;
        }
        return HIPLAN_ERR_PARSE;
    } catch (...) {
        set_err(err, "unknown error");
        return HIPLAN_ERR_INTERNAL;
    }
}

hiplan_status require(bool ok, char** err, const char* message) {
    if (ok) return HIPLAN_OK;
    set_err(err, message);
    return HIPLAN_ERR_ARGUMENT;
}

}  // namespace

extern "C" {

const char* hiplan_version(void) { return "0.1.0"; }

void hiplan_free(char* ptr) { std::free(ptr); }

/* --- knowledge base ----------------------------------------------------- */

hiplan_status hiplan_kb_parse(const char* text, hiplan_kb_t** out, char** err) {
    if (require(text != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(err, [&] {
        *out = new hiplan_kb_t{hiplan::kb::parse_domain(text)};
        return HIPLAN_OK;
    });
}

hiplan_status hiplan_kb_parse_file(const char* path, hiplan_kb_t** out, char** err) {
    if (require(path != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(err, [&] {
        *out = new hiplan_kb_t{hiplan::kb::parse_domain(hiplan::kb::read_file(path))};
        return HIPLAN_OK;
    });
}

void hiplan_kb_free(hiplan_kb_t* kb) { delete kb; }

size_t hiplan_kb_num_objects(const hiplan_kb_t* kb) {
    return kb == nullptr ? 0 : kb->kb.objects.size();
}

size_t hiplan_kb_num_predicates(const hiplan_kb_t* kb) {
    return kb == nullptr ? 0 : kb->kb.predicates.size();
}

size_t hiplan_kb_num_operators(const hiplan_kb_t* kb) {
    return kb == nullptr ? 0 : kb->kb.operators.size();
}

hiplan_status hiplan_kb_goal(const hiplan_kb_t* kb, char** out, char** err) {
    if (require(kb != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = dup_string(kb->kb.goal.name());
    return HIPLAN_OK;
}

hiplan_status hiplan_kb_serialize(const hiplan_kb_t* kb, char** out, char** err) {
    if (require(kb != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    return guarded(err, [&] {
        *out = dup_string(hiplan::kb::serialize(kb->kb));
        return HIPLAN_OK;
    });
}

/* --- grounding table ------------------------------------------------------ */

hiplan_status hiplan_grounding_parse(const char* text, hiplan_grounding_t** out, char** err) {
    if (require(text != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(err, [&] {
        *out = new hiplan_grounding_t{hiplan::kb::parse_grounding(text)};
        return HIPLAN_OK;
    });
}

hiplan_status hiplan_grounding_parse_file(const char* path, hiplan_grounding_t** out,
                                          char** err) {
    if (require(path != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(err, [&] {
        *out = new hiplan_grounding_t{hiplan::kb::parse_grounding(hiplan::kb::read_file(path))};
        return HIPLAN_OK;
    });
}

void hiplan_grounding_free(hiplan_grounding_t* table) { delete table; }

size_t hiplan_grounding_num_entries(const hiplan_grounding_t* table) {
    return table == nullptr ? 0 : table->table.entries.size();
}

hiplan_status hiplan_grounding_entry(const hiplan_grounding_t* table, size_t index,
                                     char** symbol, int* dimension, double* lower,
                                     double* upper, char** err) {
    if (require(table != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    if (index >= table->table.entries.size()) {
        set_err(err, "grounding entry index out of range");
        return HIPLAN_ERR_ARGUMENT;
    }
    const hiplan::kb::SymbolInterval& e = table->table.entries[index];
    if (symbol != nullptr) *symbol = dup_string(e.symbol.name());
    if (dimension != nullptr) *dimension = e.dimension;
    if (lower != nullptr) *lower = e.lower;
    if (upper != nullptr) *upper = e.upper;
    return HIPLAN_OK;
}

hiplan_status hiplan_grounding_serialize(const hiplan_grounding_t* table, char** out,
                                         char** err) {
    if (require(table != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = dup_string(hiplan::kb::serialize(table->table));
    return HIPLAN_OK;
}

/* --- policy ----------------------------------------------------------------- */

hiplan_status hiplan_policy_init(const hiplan_kb_t* kb, const hiplan_grounding_t* table,
                                 double val_in, double val_nin, double sigma_init,
                                 hiplan_policy_t** out, char** err) {
    if (require(kb != nullptr && table != nullptr && out != nullptr, err, "null argument") !=
        HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(err, [&] {
        hiplan::policy::InitOptions opts;
        opts.val_in = val_in;
        opts.val_nin = val_nin;
        opts.sigma_init = sigma_init;
        auto* handle = new hiplan_policy_t;
        handle->params =
            hiplan::policy::init_policy(kb->kb, table->table, opts, handle->priors);
        *out = handle;
        return HIPLAN_OK;
    });
}

void hiplan_policy_free(hiplan_policy_t* policy) { delete policy; }

hiplan_status hiplan_policy_set_mu(hiplan_policy_t* policy, const char* symbol, double mu,
                                   char** err) {
    if (require(policy != nullptr && symbol != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    return guarded(err, [&] {
        std::size_t i = policy->params.table.index(hiplan::kb::parse_symbol_name(symbol));
        policy->params.mu[i] = mu;
        policy->priors.mu_prior[i] = mu;
        return HIPLAN_OK;
    });
}

hiplan_status hiplan_policy_set_sigma(hiplan_policy_t* policy, const char* symbol,
                                      double sigma, char** err) {
    if (require(policy != nullptr && symbol != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    return guarded(err, [&] {
        if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
        std::size_t i = policy->params.table.index(hiplan::kb::parse_symbol_name(symbol));
        policy->params.sigma[i] = sigma;
        policy->params.clamp_sigma();
        return HIPLAN_OK;
    });
}

hiplan_status hiplan_policy_plan(const hiplan_policy_t* policy, const char* start,
                                 const char* goal, size_t max_len, char** out, char** err) {
    if (require(policy != nullptr && start != nullptr && goal != nullptr && out != nullptr,
                err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(err, [&] {
        hiplan::kb::Symbol s = hiplan::kb::parse_symbol_name(start);
        hiplan::kb::Symbol g = hiplan::kb::parse_symbol_name(goal);
        if (!policy->params.table.contains(s)) {
            throw std::invalid_argument("unknown start symbol '" + s.name() + "'");
        }
        if (!policy->params.table.contains(g)) {
            throw std::invalid_argument("unknown goal symbol '" + g.name() + "'");
        }
        std::vector<hiplan::kb::Symbol> plan =
            hiplan::policy::extract_plan(s, g, policy->params, max_len);
        std::string text;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            text += (i == 0 ? "" : " -> ") + plan[i].name();
        }
        *out = dup_string(text);
        return HIPLAN_OK;
    });
}

hiplan_status hiplan_policy_dump(const hiplan_policy_t* policy, char** out, char** err) {
    if (require(policy != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = dup_string(hiplan::policy::dump_params(policy->params));
    return HIPLAN_OK;
}

hiplan_status hiplan_policy_load(const char* text, hiplan_policy_t** out, char** err) {
    if (require(text != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(err, [&] {
        auto* handle = new hiplan_policy_t;
        handle->params = hiplan::policy::load_params(text);
        // Loaded parameters double as their own prior until refined again.
        handle->priors.mu_prior = handle->params.mu;
        handle->priors.weight_prior = handle->params.weights;
        *out = handle;
        return HIPLAN_OK;
    });
}

/* --- experiments -------------------------------------------------------------- */

hiplan_status hiplan_config_load(const char* path, hiplan_config_t** out, char** err) {
    if (require(path != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(err, [&] {
        *out = new hiplan_config_t{hiplan::exp::load_config(path)};
        return HIPLAN_OK;
    });
}

hiplan_status hiplan_config_parse(const char* text, const char* base_dir,
                                  hiplan_config_t** out, char** err) {
    if (require(text != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(err, [&] {
        *out = new hiplan_config_t{
            hiplan::exp::parse_config(text, base_dir == nullptr ? "" : base_dir)};
        return HIPLAN_OK;
    });
}

void hiplan_config_free(hiplan_config_t* cfg) { delete cfg; }

hiplan_status hiplan_config_set(hiplan_config_t* cfg, const char* key, const char* value,
                                char** err) {
    if (require(cfg != nullptr && key != nullptr && value != nullptr, err, "null argument") !=
        HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    return guarded(err, [&] {
        // Reuse the file parser on the serialized config plus the new line,
        // so overrides get exactly the file syntax and validation.
        std::string text = hiplan::exp::serialize_config(cfg->cfg);
        text += std::string(key) + "=" + value + "\n";
        cfg->cfg = hiplan::exp::parse_config(text, "");
        return HIPLAN_OK;
    });
}

hiplan_status hiplan_config_serialize(const hiplan_config_t* cfg, char** out, char** err) {
    if (require(cfg != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = dup_string(hiplan::exp::serialize_config(cfg->cfg));
    return HIPLAN_OK;
}

hiplan_status hiplan_run(const hiplan_config_t* cfg, char** out_dir, char** err) {
    if (require(cfg != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    if (out_dir != nullptr) *out_dir = nullptr;
    return guarded(err, [&] {
        hiplan::exp::RunResult result = hiplan::exp::run_arm(cfg->cfg);
        if (out_dir != nullptr) *out_dir = dup_string(result.output_dir);
        return HIPLAN_OK;
    });
}

hiplan_status hiplan_plan_initial(const hiplan_config_t* cfg, char** out, char** err) {
    if (require(cfg != nullptr && out != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(err, [&] {
        *out = dup_string(hiplan::exp::initial_plan(cfg->cfg));
        return HIPLAN_OK;
    });
}

hiplan_status hiplan_compare(const char* const* run_dirs, size_t num_dirs, size_t window,
                             char** out_csv, char** err) {
    if (require(run_dirs != nullptr && out_csv != nullptr, err, "null argument") != HIPLAN_OK) {
        return HIPLAN_ERR_ARGUMENT;
    }
    *out_csv = nullptr;
    return guarded(err, [&] {
        std::vector<std::string> dirs(run_dirs, run_dirs + num_dirs);
        *out_csv = dup_string(hiplan::exp::compare(dirs, window));
        return HIPLAN_OK;
    });
}

} /* extern "C" */
