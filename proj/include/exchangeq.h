/* C API of the exchange-q library. All heavy state lives behind opaque
 * handles; every entry point returns a status code from xq_status_code. */
#ifndef EXCHANGEQ_H
#define EXCHANGEQ_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Nonzero values match the CLI exit-code contract:
 * 2 schema/config problem, 3 numerical validation failure, 4 inference
 * failure, 5 internal error. */
enum xq_status_code {
  XQ_OK = 0,
  XQ_ERR_SCHEMA = 2,
  XQ_ERR_VALIDATION = 3,
  XQ_ERR_INFERENCE = 4,
  XQ_ERR_INTERNAL = 5
};

typedef struct xq_scenario xq_scenario;
typedef struct xq_report xq_report;

const char* xq_version(void);

/* Message and JSON pointer (possibly empty) of the last failed call on the
 * calling thread. Valid until the next failing call on the same thread. */
const char* xq_last_error(void);
const char* xq_last_error_pointer(void);

/* Loading parses the config, resolves every cross-reference and constructs
 * all objects; invalid configs fail here. */
int xq_scenario_load(const char* config_path, xq_scenario** out);
int xq_scenario_load_string(const char* config_json, xq_scenario** out);
void xq_scenario_free(xq_scenario* scenario);

/* Re-measures every constructor invariant and tabulates the result. A report
 * is produced even when checks fail; the return value is the exit code. */
int xq_validate(const char* config_path, xq_report** out_report);

/* Runs all queries. threads must be >= 1 and never changes the numbers. */
int xq_scenario_run(const xq_scenario* scenario, int threads, xq_report** out_report);

/* Convenience: load, run, and write the report JSON to output_path. */
int xq_run_file(const char* config_path, const char* output_path, int threads);

const char* xq_report_json(const xq_report* report);
const char* xq_report_text(const xq_report* report);
void xq_report_free(xq_report* report);

#ifdef __cplusplus
}
#endif

#endif /* EXCHANGEQ_H */
