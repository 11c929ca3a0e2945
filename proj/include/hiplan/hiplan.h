/* hiplan — hierarchical planner refinement library.
 *
 * C interface over the C++ core. All functions returning hiplan_status
 * accept an optional char** err out-parameter; on failure it receives a
 * malloc'd message that must be released with hiplan_free(). Strings
 * returned through char** out-parameters follow the same rule. Handles are
 * released with their matching *_free function; passing NULL to any free
 * function is a no-op.
 */
#ifndef HIPLAN_H
#define HIPLAN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct hiplan_kb_t hiplan_kb_t;
typedef struct hiplan_grounding_t hiplan_grounding_t;
typedef struct hiplan_policy_t hiplan_policy_t;
typedef struct hiplan_config_t hiplan_config_t;

typedef enum hiplan_status {
    HIPLAN_OK = 0,
    HIPLAN_ERR_PARSE = 1,    /* malformed input or invariant violation */
    HIPLAN_ERR_IO = 2,       /* file could not be read or written */
    HIPLAN_ERR_ARGUMENT = 3, /* invalid argument or unknown name */
    HIPLAN_ERR_INTERNAL = 4,
} hiplan_status;

const char* hiplan_version(void);

/* Release a string returned by this library. */
void hiplan_free(char* ptr);

/* --- planning domain (PDDL subset) ------------------------------------- */

hiplan_status hiplan_kb_parse(const char* text, hiplan_kb_t** out, char** err);
hiplan_status hiplan_kb_parse_file(const char* path, hiplan_kb_t** out, char** err);
void hiplan_kb_free(hiplan_kb_t* kb);

size_t hiplan_kb_num_objects(const hiplan_kb_t* kb);
size_t hiplan_kb_num_predicates(const hiplan_kb_t* kb);
size_t hiplan_kb_num_operators(const hiplan_kb_t* kb);

/* Goal symbol as "Predicate(Object)". */
hiplan_status hiplan_kb_goal(const hiplan_kb_t* kb, char** out, char** err);

/* Round-trippable textual form. */
hiplan_status hiplan_kb_serialize(const hiplan_kb_t* kb, char** out, char** err);

/* --- symbol grounding table --------------------------------------------- */

hiplan_status hiplan_grounding_parse(const char* text, hiplan_grounding_t** out, char** err);
hiplan_status hiplan_grounding_parse_file(const char* path, hiplan_grounding_t** out,
                                          char** err);
void hiplan_grounding_free(hiplan_grounding_t* table);

size_t hiplan_grounding_num_entries(const hiplan_grounding_t* table);

/* Entry fields by index; any out pointer may be NULL. The symbol string
 * must be released with hiplan_free. */
hiplan_status hiplan_grounding_entry(const hiplan_grounding_t* table, size_t index,
                                     char** symbol, int* dimension, double* lower,
                                     double* upper, char** err);

hiplan_status hiplan_grounding_serialize(const hiplan_grounding_t* table, char** out,
                                         char** err);

/* --- grounded policy ------------------------------------------------------ */

/* Build an initialized policy from the two knowledge bases: interval-mean
 * priors for each symbol's mu, val_in/val_nin weight priors from the
 * operators, sigma_init everywhere. */
hiplan_status hiplan_policy_init(const hiplan_kb_t* kb, const hiplan_grounding_t* table,
                                 double val_in, double val_nin, double sigma_init,
                                 hiplan_policy_t** out, char** err);
void hiplan_policy_free(hiplan_policy_t* policy);

/* Override one symbol's mu (and its prior) or sigma before refining. */
hiplan_status hiplan_policy_set_mu(hiplan_policy_t* policy, const char* symbol, double mu,
                                   char** err);
hiplan_status hiplan_policy_set_sigma(hiplan_policy_t* policy, const char* symbol,
                                      double sigma, char** err);

/* Greedy plan "A -> B -> C" from start to goal (symbols as
 * "Predicate(Object)"), at most max_len symbols long. */
hiplan_status hiplan_policy_plan(const hiplan_policy_t* policy, const char* start,
                                 const char* goal, size_t max_len, char** out, char** err);

/* Parameter table dump; hiplan_policy_load parses the same format. */
hiplan_status hiplan_policy_dump(const hiplan_policy_t* policy, char** out, char** err);
hiplan_status hiplan_policy_load(const char* text, hiplan_policy_t** out, char** err);

/* --- experiments ----------------------------------------------------------- */

hiplan_status hiplan_config_load(const char* path, hiplan_config_t** out, char** err);
hiplan_status hiplan_config_parse(const char* text, const char* base_dir,
                                  hiplan_config_t** out, char** err);
void hiplan_config_free(hiplan_config_t* cfg);

/* Override a single key, same syntax as a config-file line. */
hiplan_status hiplan_config_set(hiplan_config_t* cfg, const char* key, const char* value,
                                char** err);
hiplan_status hiplan_config_serialize(const hiplan_config_t* cfg, char** out, char** err);

/* Run the configured arm; writes metrics.csv, parameter and plan dumps, the
 * config echo and the run manifest into the configured output directory,
 * which is returned through out_dir. */
hiplan_status hiplan_run(const hiplan_config_t* cfg, char** out_dir, char** err);

/* Plan extracted from the configuration's initial parameters. */
hiplan_status hiplan_plan_initial(const hiplan_config_t* cfg, char** out, char** err);

/* Pool finished runs: per-arm mean and standard error of avg_return over the
 * trailing `window` epochs, as CSV. */
hiplan_status hiplan_compare(const char* const* run_dirs, size_t num_dirs, size_t window,
                             char** out_csv, char** err);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HIPLAN_H */
