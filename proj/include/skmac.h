/* skmac - secret-key generation over a two-input MAC with public communication.
 *
 * C API of the shared library. All functions return a status code; on error
 * skm_last_error() gives a message for the calling thread. Objects are opaque
 * handles released with their _free function. JSON reports are heap strings
 * released with skm_string_free.
 */

#ifndef SKMAC_H
#define SKMAC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum skm_status {
  SKM_OK = 0,
  SKM_ERR_INVALID_ARGUMENT = 1,
  SKM_ERR_SCHEMA = 2,
  SKM_ERR_IO = 3,
  SKM_ERR_BUDGET = 4,
  SKM_ERR_INTERNAL = 5
} skm_status;

typedef struct skm_channel skm_channel;
typedef struct skm_joint skm_joint;

/* last error message for this thread; valid until the next failing call */
const char* skm_last_error(void);

void skm_string_free(char* s);

/* ---- channels and laws ------------------------------------------------- */

skm_status skm_channel_load(const char* path, skm_channel** out);
skm_status skm_channel_from_json(const char* json_text, skm_channel** out);
/* "adder", "xor", "noisy-adder:<flip>", "useless" */
skm_status skm_channel_builtin(const char* name, skm_channel** out);
void skm_channel_free(skm_channel* ch);
skm_status skm_channel_dims(const skm_channel* ch, int* in1, int* in2, int* out);

skm_status skm_joint_load(const char* path, skm_joint** out);
skm_status skm_joint_from_json(const char* json_text, skm_joint** out);
void skm_joint_free(skm_joint* j);

/* ---- exact information measures (bits) --------------------------------- */

skm_status skm_entropy(const skm_joint* j, const int* vars, size_t n_vars, double* out);
skm_status skm_conditional_entropy(const skm_joint* j, const int* a, size_t n_a, const int* b, size_t n_b,
                                   double* out);
skm_status skm_mutual_information(const skm_joint* j, const int* a, size_t n_a, const int* b, size_t n_b,
                                  const int* given, size_t n_given, double* out);
skm_status skm_kl_divergence(const skm_joint* p, const skm_joint* q, double* out);
skm_status skm_security_index(const skm_joint* j, const int* kvars, size_t n_k, const int* fvars,
                              size_t n_f, double* out);

/* ---- reports (JSON strings) --------------------------------------------
 * Each runner mirrors one CLI subcommand and writes a versioned JSON report.
 */

skm_status skm_rstar(const skm_channel* ch, int grid, int refine, uint64_t seed, char** report_json);

skm_status skm_fbcode_rate(int64_t k, double slack_c, char** report_json);

skm_status skm_simulate_code(const skm_channel* ch, int k, double slack_c, uint64_t trials, uint64_t seed,
                             int threads, char** report_json);

/* law variables must be (Y_1..Y_m, K, F); partition_spec: "lp", "all" or
 * blocks such as "1|2,3" */
skm_status skm_bound(const skm_joint* law, int m_terminals, const char* partition_spec, double eps,
                     char** report_json);

skm_status skm_check_interactive(const char* proto_path, const char* law_path, const char* partition_spec,
                                 char** report_json);

skm_status skm_sk_se(const skm_channel* ch, int n, double rate1, double rate2, uint64_t trials,
                     uint64_t seed, char** report_json);

skm_status skm_sk_feedback(const skm_channel* ch, int k, int blocks, double dsw, double dpa, double slack_c,
                           uint64_t seed, int threads, char** report_json);

/* exact <=> trials == 0 */
skm_status skm_sk_run(const char* proto_path, const skm_channel* ch, uint64_t trials, uint64_t seed,
                      char** report_json);

skm_status skm_verify_suite(int full, uint64_t seed, int threads, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* SKMAC_H */
