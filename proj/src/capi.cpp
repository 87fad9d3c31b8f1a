#include "csrank.h"

#include <exception>
#include <memory>
#include <set>
#include <string>
#include <utility>

#include "csrank/dataio.hpp"
#include "csrank/error.hpp"
#include "csrank/eval.hpp"
#include "csrank/ranking.hpp"
#include "csrank/simulator.hpp"
#include "csrank/version.hpp"

struct csr_dataset {
  csrank::Dataset value;
};

struct csr_ranking {
  csrank::RankedList list;
  csrank::PriorityVector pv;
};

struct csr_trace {
  csrank::SimTrace value;
};

struct csr_eval_report {
  csrank::EvalReport value;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_number_buf;

csr_status status_of(csrank::Errc code) {
  using csrank::Errc;
  switch (code) {
    case Errc::ok: return CSR_OK;
    case Errc::empty_universe: return CSR_E_EMPTY_UNIVERSE;
    case Errc::insufficient_overlap: return CSR_E_INSUFFICIENT_OVERLAP;
    case Errc::no_services: return CSR_E_NO_SERVICES;
    case Errc::unschedulable_job: return CSR_E_UNSCHEDULABLE_JOB;
    case Errc::not_running: return CSR_E_NOT_RUNNING;
    case Errc::unknown_subcloud: return CSR_E_UNKNOWN_SUBCLOUD;
    case Errc::capacity_exceeded: return CSR_E_CAPACITY_EXCEEDED;
    case Errc::parse_error: return CSR_E_PARSE;
    case Errc::duplicate_observation: return CSR_E_DUPLICATE_OBSERVATION;
    case Errc::invalid_value: return CSR_E_INVALID_VALUE;
    case Errc::io_error: return CSR_E_IO;
    case Errc::invalid_parameter: return CSR_E_INVALID_ARGUMENT;
    case Errc::unknown_consumer: return CSR_E_UNKNOWN_CONSUMER;
    case Errc::dataset_too_small: return CSR_E_DATASET_TOO_SMALL;
    case Errc::internal: return CSR_E_INTERNAL;
  }
  return CSR_E_INTERNAL;
}

template <typename Fn>
csr_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return CSR_OK;
  } catch (const csrank::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CSR_E_INTERNAL;
  } catch (...) {
    g_last_error = "unidentified failure";
    return CSR_E_INTERNAL;
  }
}

csr_status arg_error(const char* message) {
  g_last_error = message;
  return CSR_E_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* csr_version(void) { return csrank::kVersion; }

const char* csr_status_name(csr_status status) {
  switch (status) {
    case CSR_OK: return "OK";
    case CSR_E_INVALID_ARGUMENT: return "INVALID_ARGUMENT";
    case CSR_E_EMPTY_UNIVERSE: return "EMPTY_UNIVERSE";
    case CSR_E_INSUFFICIENT_OVERLAP: return "INSUFFICIENT_OVERLAP";
    case CSR_E_NO_SERVICES: return "NO_SERVICES";
    case CSR_E_UNSCHEDULABLE_JOB: return "UNSCHEDULABLE_JOB";
    case CSR_E_NOT_RUNNING: return "NOT_RUNNING";
    case CSR_E_UNKNOWN_SUBCLOUD: return "UNKNOWN_SUBCLOUD";
    case CSR_E_CAPACITY_EXCEEDED: return "CAPACITY_EXCEEDED";
    case CSR_E_PARSE: return "PARSE";
    case CSR_E_DUPLICATE_OBSERVATION: return "DUPLICATE_OBSERVATION";
    case CSR_E_INVALID_VALUE: return "INVALID_VALUE";
    case CSR_E_IO: return "IO";
    case CSR_E_UNKNOWN_CONSUMER: return "UNKNOWN_CONSUMER";
    case CSR_E_DATASET_TOO_SMALL: return "DATASET_TOO_SMALL";
    case CSR_E_INTERNAL: return "INTERNAL";
  }
  return "INTERNAL";
}

const char* csr_last_error(void) { return g_last_error.c_str(); }

const char* csr_format_number(double value) {
  try {
    g_number_buf = csrank::format_number(value);
  } catch (...) {
    g_number_buf = "nan";
  }
  return g_number_buf.c_str();
}

csr_status csr_dataset_load(const char* csv_path, csr_dataset** out) {
  if (!csv_path || !out) return arg_error("csv_path and out must not be null");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<csr_dataset>();
    handle->value = csrank::load_observations(csv_path);
    *out = handle.release();
  });
}

csr_status csr_dataset_load_truth(csr_dataset* dataset, const char* json_path) {
  if (!dataset || !json_path) {
    return arg_error("dataset and json_path must not be null");
  }
  return guarded([&] {
    csrank::RankedList truth = csrank::load_ranking(json_path);
    if (truth.ordering.size() != dataset->value.services.size()) {
      csrank::fail(csrank::Errc::invalid_value,
                   std::string("ground truth at '") + json_path + "' covers " +
                       std::to_string(truth.ordering.size()) +
                       " services, dataset has " +
                       std::to_string(dataset->value.services.size()));
    }
    for (const auto& s : dataset->value.services) {
      if (!truth.rank_of.count(s)) {
        csrank::fail(csrank::Errc::invalid_value,
                     std::string("ground truth at '") + json_path +
                         "' is missing service '" + s + "'");
      }
    }
    dataset->value.ground_truth = std::move(truth);
  });
}

csr_status csr_dataset_generate(uint64_t seed, int n_services, int n_consumers,
                                double noise, double observe_prob,
                                csr_dataset** out) {
  if (!out) return arg_error("out must not be null");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<csr_dataset>();
    handle->value = csrank::generate_synthetic(seed, n_services, n_consumers,
                                               noise, observe_prob);
    *out = handle.release();
  });
}

csr_status csr_dataset_save_csv(const csr_dataset* dataset, const char* path) {
  if (!dataset || !path) return arg_error("dataset and path must not be null");
  return guarded([&] { csrank::save_observations(dataset->value, path); });
}

csr_status csr_dataset_save_truth(const csr_dataset* dataset, const char* path) {
  if (!dataset || !path) return arg_error("dataset and path must not be null");
  return guarded([&] {
    if (!dataset->value.ground_truth) {
      csrank::fail(csrank::Errc::invalid_parameter,
                   "dataset carries no ground truth");
    }
    csrank::save_ground_truth(*dataset->value.ground_truth, path);
  });
}

size_t csr_dataset_service_count(const csr_dataset* dataset) {
  return dataset ? dataset->value.services.size() : 0;
}

const char* csr_dataset_service(const csr_dataset* dataset, size_t index) {
  if (!dataset || index >= dataset->value.services.size()) return nullptr;
  return dataset->value.services[index].c_str();
}

size_t csr_dataset_consumer_count(const csr_dataset* dataset) {
  return dataset ? dataset->value.consumers.size() : 0;
}

const char* csr_dataset_consumer(const csr_dataset* dataset, size_t index) {
  if (!dataset || index >= dataset->value.consumers.size()) return nullptr;
  return dataset->value.consumers[index].consumer.c_str();
}

void csr_dataset_free(csr_dataset* dataset) { delete dataset; }

csr_status csr_predict(const csr_dataset* dataset, const char* consumer,
                       const char* const* implicit, size_t n_implicit,
                       csr_ranking** out) {
  if (!dataset || !consumer || !out) {
    return arg_error("dataset, consumer and out must not be null");
  }
  if (n_implicit > 0 && !implicit) {
    return arg_error("implicit must not be null when n_implicit is nonzero");
  }
  *out = nullptr;
  return guarded([&] {
    std::set<csrank::ServiceId> imp;
    for (size_t i = 0; i < n_implicit; ++i) {
      if (!implicit[i]) {
        csrank::fail(csrank::Errc::invalid_parameter,
                     "implicit service list holds a null entry");
      }
      imp.insert(implicit[i]);
    }
    csrank::RankingContext ctx =
        csrank::make_context(dataset->value, consumer, imp);
    auto [list, pv] = csrank::predict_with_priorities(
        ctx, csrank::service_set(dataset->value));
    auto handle = std::make_unique<csr_ranking>();
    handle->list = std::move(list);
    handle->pv = std::move(pv);
    *out = handle.release();
  });
}

size_t csr_ranking_size(const csr_ranking* ranking) {
  return ranking ? ranking->list.ordering.size() : 0;
}

const char* csr_ranking_service(const csr_ranking* ranking, size_t index) {
  if (!ranking || index >= ranking->list.ordering.size()) return nullptr;
  return ranking->list.ordering[index].c_str();
}

csr_status csr_ranking_priority(const csr_ranking* ranking, const char* service,
                                double* out) {
  if (!ranking || !service || !out) {
    return arg_error("ranking, service and out must not be null");
  }
  return guarded([&] {
    auto it = ranking->pv.find(service);
    if (it == ranking->pv.end()) {
      csrank::fail(csrank::Errc::invalid_parameter,
                   std::string("no priority value for service '") + service +
                       "'");
    }
    *out = it->second;
  });
}

csr_status csr_ranking_save(const csr_ranking* ranking, const char* path) {
  if (!ranking || !path) return arg_error("ranking and path must not be null");
  return guarded([&] { csrank::save_ranking(ranking->list, ranking->pv, path); });
}

void csr_ranking_free(csr_ranking* ranking) { delete ranking; }

csr_status csr_correspondence(const csr_dataset* dataset, const char* consumer_x,
                              const char* consumer_y, int* n, long long* a,
                              long long* b, double* cv) {
  if (!dataset || !consumer_x || !consumer_y) {
    return arg_error("dataset and both consumers must not be null");
  }
  return guarded([&] {
    const csrank::ObservationSet* x =
        csrank::find_consumer(dataset->value, consumer_x);
    if (!x) {
      csrank::fail(csrank::Errc::unknown_consumer,
                   std::string("unknown consumer '") + consumer_x + "'");
    }
    const csrank::ObservationSet* y =
        csrank::find_consumer(dataset->value, consumer_y);
    if (!y) {
      csrank::fail(csrank::Errc::unknown_consumer,
                   std::string("unknown consumer '") + consumer_y + "'");
    }
    csrank::CorrespondenceValue value = csrank::correspondence_value(*x, *y);
    if (n) *n = value.n;
    if (a) *a = value.a;
    if (b) *b = value.b;
    if (cv) *cv = value.cv;
  });
}

csr_status csr_eval(const csr_dataset* dataset, double holdout,
                    csr_eval_report** out) {
  if (!dataset || !out) return arg_error("dataset and out must not be null");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<csr_eval_report>();
    handle->value = csrank::evaluate_dataset(dataset->value, holdout);
    *out = handle.release();
  });
}

size_t csr_eval_consumer_count(const csr_eval_report* report) {
  return report ? report->value.per_consumer.size() : 0;
}

const char* csr_eval_consumer(const csr_eval_report* report, size_t index) {
  if (!report || index >= report->value.per_consumer.size()) return nullptr;
  return report->value.per_consumer[index].consumer.c_str();
}

double csr_eval_cv(const csr_eval_report* report, size_t index) {
  if (!report || index >= report->value.per_consumer.size()) return 0.0;
  return report->value.per_consumer[index].cv;
}

double csr_eval_mean_cv(const csr_eval_report* report) {
  return report ? report->value.mean_cv : 0.0;
}

void csr_eval_report_free(csr_eval_report* report) { delete report; }

csr_status csr_simulate_file(const char* config_path, csr_trace** out) {
  if (!config_path || !out) {
    return arg_error("config_path and out must not be null");
  }
  *out = nullptr;
  return guarded([&] {
    csrank::SimConfig config = csrank::load_sim_config(config_path);
    auto handle = std::make_unique<csr_trace>();
    handle->value = csrank::run(config);
    *out = handle.release();
  });
}

csr_status csr_trace_save_json(const csr_trace* trace, const char* path) {
  if (!trace || !path) return arg_error("trace and path must not be null");
  return guarded([&] { csrank::save_trace(trace->value, path); });
}

csr_status csr_trace_save_observations_csv(const csr_trace* trace,
                                           const char* path) {
  if (!trace || !path) return arg_error("trace and path must not be null");
  return guarded([&] { csrank::save_trace_observations(trace->value, path); });
}

size_t csr_trace_event_count(const csr_trace* trace) {
  return trace ? trace->value.events.size() : 0;
}

size_t csr_trace_observation_count(const csr_trace* trace) {
  return trace ? trace->value.observations.size() : 0;
}

void csr_trace_free(csr_trace* trace) { delete trace; }

}  // extern "C"
