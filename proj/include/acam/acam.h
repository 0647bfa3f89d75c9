/* C interface to the analog CAM simulator and compiler.
 *
 * All handles are opaque. Every call returns an acam_status; on failure the
 * message is available from acam_last_error() on the same thread. Strings
 * returned through char** outputs are owned by the caller and released with
 * acam_free_string(). Conductances are in siemens and voltages in volts. */
#ifndef ACAM_H
#define ACAM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    ACAM_OK = 0,
    ACAM_ERR_PARSE = 1,
    ACAM_ERR_DOMAIN = 2,
    ACAM_ERR_CONVERGENCE = 3,
    ACAM_ERR_INCONSISTENT = 4,
    ACAM_ERR_AMBIGUOUS = 5,
    ACAM_ERR_INVALID_ARGUMENT = 6,
    ACAM_ERR_NULL = 7,
    ACAM_ERR_INTERNAL = 8
} acam_status;

typedef struct acam_config acam_config;
typedef struct acam_table acam_table;
typedef struct acam_array acam_array;

const char* acam_last_error(void);
const char* acam_status_name(acam_status s);
void acam_free_string(char* s);

/* Config document (device, ts_device, array, energy, area sections). NULL or
 * "" gives the calibrated defaults; fields present in json override them. */
acam_status acam_config_create(const char* json, acam_config** out);
acam_status acam_config_to_json(const acam_config* cfg, char** out);
void acam_config_free(acam_config* cfg);

/* Fits the device thresholds and beta to anchor intervals (NULL: the two
 * built-in anchors) and stores the result in cfg. report gets per-anchor
 * residuals as JSON; it may be NULL. */
acam_status acam_calibrate(acam_config* cfg, const char* anchors_json, char** report);

acam_status acam_bounds(const acam_config* cfg, double g_m1, double g_m2, double* lo, double* hi);
acam_status acam_conductances(const acam_config* cfg, double lo, double hi, double* g_m1,
                              double* g_m2);

/* Rules are JSON lines {"lo":..,"hi":..,"width_bits":..,"label":..}.
 * bits_per_cell == 0 compiles ternary words. */
acam_status acam_table_compile_rules(const char* jsonl, int bits_per_cell, acam_table** out);
acam_status acam_table_compile_tree(const char* tree_json, acam_table** out);
acam_status acam_table_load(const char* json, acam_table** out);
acam_status acam_table_to_json(const acam_table* t, char** out);
acam_status acam_table_grid(const acam_table* t, char** out);
acam_status acam_table_shape(const acam_table* t, int* rows, int* cols);
void acam_table_free(acam_table* t);

acam_status acam_array_from_table(const acam_config* cfg, const acam_table* t, acam_array** out);
/* Array document with explicit "cells" rows, or "rows"/"cols" plus a
 * "uniform" cell. Electrical fields default to the config's array section. */
acam_status acam_array_load(const acam_config* cfg, const char* json, acam_array** out);
acam_status acam_array_to_json(const acam_array* a, char** out);
acam_status acam_array_shape(const acam_array* a, int* rows, int* cols);
/* 0: transistor pull-down, 1: threshold-switch pull-up. */
acam_status acam_array_set_variant(acam_array* a, int ts);
/* Replaces every target conductance with a program-and-verify result. */
acam_status acam_array_program(acam_array* a, uint64_t seed);
void acam_array_free(acam_array* a);

/* One query per CSV line of DL voltages; output CSV query,row,v_ml,matched,latency_ps. */
acam_status acam_array_search_csv(const acam_array* a, const char* csv, char** out);

/* Sweeps one column over [0, 1] V with the other columns at bias.
 * csv gets v_dl,row,v_ml,matched; bands gets JSON per row with refined edges
 * or "empty": true. */
acam_status acam_array_sweep(const acam_array* a, int column, double step, double bias,
                             char** csv, char** bands);

/* Feature vectors (tree tables) or integer keys (rule tables), one per CSV
 * line; output CSV index,label. Rows that cannot be classified get
 * "error:<kind>" as their label. */
acam_status acam_array_classify_csv(const acam_array* a, const char* csv, char** out);

/* Energy for rows x cols (from t when given), plus the range comparison
 * when t holds exactly one rule. bits lists the digit widths to compare
 * (NULL: the table's own width). json and text may be NULL. */
acam_status acam_cost_report(const acam_config* cfg, const acam_table* t, int rows, int cols,
                             const int* bits, size_t n_bits, int dac, char** json, char** text);

#ifdef __cplusplus
}
#endif

#endif
