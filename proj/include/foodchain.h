/* C interface to the foodchain library: opaque config handles, integer
 * status codes, thread-local error strings. The CLI links only this. */
#ifndef FOODCHAIN_H
#define FOODCHAIN_H

#ifdef __cplusplus
extern "C" {
#endif

/* status / exit codes */
#define FC_OK 0
#define FC_ERR_USAGE 2      /* unknown subcommand, key, or bad value */
#define FC_ERR_BAD_INPUT 3  /* malformed or missing input file */
#define FC_ERR_INFEASIBLE 4 /* fleet cannot meet the reduction target */
#define FC_ERR_INTERNAL 5

typedef struct fc_config fc_config;

/* Creates a config pre-filled with the named profile's defaults ("desk" or
 * "paper") and any FOODCHAIN_* environment overrides. NULL on error. */
fc_config* fc_config_create(const char* profile);
void fc_config_destroy(fc_config* cfg);

/* Overrides one key, e.g. fc_config_set(cfg, "train.epochs", "30"). */
int fc_config_set(fc_config* cfg, const char* key, const char* value);

/* Loads "key = value" lines with optional [section] headers. */
int fc_config_load_file(fc_config* cfg, const char* path);

/* Reads a key's current value into buf (NUL-terminated, truncated to
 * buf_len). Returns FC_OK or FC_ERR_USAGE for unknown keys. */
int fc_config_get(const fc_config* cfg, const char* key, char* buf,
                  unsigned long buf_len);

/* Runs one subcommand (ingest | train | forecast | ablate | cluster |
 * adapt | fridge-sim | fridge-train | fridge-select | report); artifacts
 * land in the config's run.out directory. Progress text goes to stdout.
 * Returns one of the codes above. */
int fc_run(const char* subcommand, fc_config* cfg);

/* Message for the calling thread's last failed fc_* call ("" if none). */
const char* fc_last_error(void);

const char* fc_version(void);

/* Help metadata: number of config keys, and per-key name / desk default /
 * paper value / one-line description. Index out of range returns NULL. */
unsigned long fc_config_key_count(void);
const char* fc_config_key_name(unsigned long i);
const char* fc_config_key_default(unsigned long i);
const char* fc_config_key_paper(unsigned long i);
const char* fc_config_key_doc(unsigned long i);

#ifdef __cplusplus
}
#endif

#endif /* FOODCHAIN_H */
