/* C interface for the csrank library: QoS-based cloud service rank
 * prediction plus a deterministic checkpoint/load-balancing simulator.
 *
 * Conventions:
 *   - Every fallible call returns a csr_status; CSR_OK is zero.
 *   - On failure, csr_last_error() returns a thread-local message that stays
 *     valid until the next failing call on the same thread.
 *   - Objects come back through out-parameters as opaque handles and must be
 *     released with the matching csr_*_free function. Free functions accept
 *     null.
 *   - Strings returned by accessors live as long as their handle.
 */

#ifndef CSRANK_H
#define CSRANK_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum csr_status {
  CSR_OK = 0,
  CSR_E_INVALID_ARGUMENT,
  CSR_E_EMPTY_UNIVERSE,
  CSR_E_INSUFFICIENT_OVERLAP,
  CSR_E_NO_SERVICES,
  CSR_E_UNSCHEDULABLE_JOB,
  CSR_E_NOT_RUNNING,
  CSR_E_UNKNOWN_SUBCLOUD,
  CSR_E_CAPACITY_EXCEEDED,
  CSR_E_PARSE,
  CSR_E_DUPLICATE_OBSERVATION,
  CSR_E_INVALID_VALUE,
  CSR_E_IO,
  CSR_E_UNKNOWN_CONSUMER,
  CSR_E_DATASET_TOO_SMALL,
  CSR_E_INTERNAL
} csr_status;

typedef struct csr_dataset csr_dataset;
typedef struct csr_ranking csr_ranking;
typedef struct csr_trace csr_trace;
typedef struct csr_eval_report csr_eval_report;

const char* csr_version(void);
const char* csr_status_name(csr_status status);
const char* csr_last_error(void);

/* Renders a number the same way the file writers do: decimal, up to 6
 * fractional digits, trailing zeros trimmed. Thread-local buffer, valid until
 * the next call on the same thread. */
const char* csr_format_number(double value);

/* ---- datasets ---- */

csr_status csr_dataset_load(const char* csv_path, csr_dataset** out);
csr_status csr_dataset_load_truth(csr_dataset* dataset, const char* json_path);
csr_status csr_dataset_generate(uint64_t seed, int n_services, int n_consumers,
                                double noise, double observe_prob,
                                csr_dataset** out);
csr_status csr_dataset_save_csv(const csr_dataset* dataset, const char* path);
csr_status csr_dataset_save_truth(const csr_dataset* dataset, const char* path);
size_t csr_dataset_service_count(const csr_dataset* dataset);
const char* csr_dataset_service(const csr_dataset* dataset, size_t index);
size_t csr_dataset_consumer_count(const csr_dataset* dataset);
const char* csr_dataset_consumer(const csr_dataset* dataset, size_t index);
void csr_dataset_free(csr_dataset* dataset);

/* ---- rank prediction ---- */

/* Predicts the ranked service list for one consumer of the dataset. implicit
 * lists services the consumer has already accessed (may be null when
 * n_implicit is zero); each must appear among the consumer's samples. */
csr_status csr_predict(const csr_dataset* dataset, const char* consumer,
                       const char* const* implicit, size_t n_implicit,
                       csr_ranking** out);
size_t csr_ranking_size(const csr_ranking* ranking);
/* index is 0-based; rank 1 is index 0. Null when out of range. */
const char* csr_ranking_service(const csr_ranking* ranking, size_t index);
csr_status csr_ranking_priority(const csr_ranking* ranking, const char* service,
                                double* out);
csr_status csr_ranking_save(const csr_ranking* ranking, const char* path);
void csr_ranking_free(csr_ranking* ranking);

/* Pair agreement between two consumers: jointly observed count, concordant
 * and discordant pair counts, and the correspondence value. Any out-pointer
 * may be null. */
csr_status csr_correspondence(const csr_dataset* dataset, const char* consumer_x,
                              const char* consumer_y, int* n, long long* a,
                              long long* b, double* cv);

/* ---- evaluation ---- */

csr_status csr_eval(const csr_dataset* dataset, double holdout,
                    csr_eval_report** out);
size_t csr_eval_consumer_count(const csr_eval_report* report);
const char* csr_eval_consumer(const csr_eval_report* report, size_t index);
double csr_eval_cv(const csr_eval_report* report, size_t index);
double csr_eval_mean_cv(const csr_eval_report* report);
void csr_eval_report_free(csr_eval_report* report);

/* ---- simulation ---- */

csr_status csr_simulate_file(const char* config_path, csr_trace** out);
csr_status csr_trace_save_json(const csr_trace* trace, const char* path);
csr_status csr_trace_save_observations_csv(const csr_trace* trace,
                                           const char* path);
size_t csr_trace_event_count(const csr_trace* trace);
size_t csr_trace_observation_count(const csr_trace* trace);
void csr_trace_free(csr_trace* trace);

#ifdef __cplusplus
}
#endif

#endif /* CSRANK_H */
