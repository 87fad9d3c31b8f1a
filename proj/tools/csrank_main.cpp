// Command-line front door. Talks to the library exclusively through the
// C API in csrank.h; exit codes are 0 success, 1 usage, 2 data, 3 internal.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csrank.h"

namespace {

int exit_for(csr_status status) {
  if (status == CSR_OK) return 0;
  return status == CSR_E_INTERNAL ? 3 : 2;
}

int fail_with(csr_status status) {
  std::fprintf(stderr, "csrank: error: %s\n", csr_last_error());
  return exit_for(status);
}

int usage_error(const char* message) {
  std::fprintf(stderr, "csrank: error: %s\n", message);
  return 1;
}

int run_rank(const std::string& input, const std::string& consumer,
             const std::vector<std::string>& implicit,
             const std::string& output) {
  csr_dataset* ds = nullptr;
  csr_status s = csr_dataset_load(input.c_str(), &ds);
  if (s != CSR_OK) return fail_with(s);

  std::vector<const char*> imp;
  imp.reserve(implicit.size());
  for (const auto& id : implicit) imp.push_back(id.c_str());

  csr_ranking* ranking = nullptr;
  s = csr_predict(ds, consumer.c_str(), imp.empty() ? nullptr : imp.data(),
                  imp.size(), &ranking);
  if (s != CSR_OK) {
    csr_dataset_free(ds);
    return fail_with(s);
  }

  if (!output.empty()) {
    s = csr_ranking_save(ranking, output.c_str());
    if (s != CSR_OK) {
      csr_ranking_free(ranking);
      csr_dataset_free(ds);
      return fail_with(s);
    }
  }

  size_t n = csr_ranking_size(ranking);
  for (size_t i = 0; i < n; ++i) {
    const char* service = csr_ranking_service(ranking, i);
    double pv = 0.0;
    csr_ranking_priority(ranking, service, &pv);
    std::printf("%s %s\n", service, csr_format_number(pv));
  }
  csr_ranking_free(ranking);
  csr_dataset_free(ds);
  return 0;
}

int run_simulate(const std::string& config, const std::string& trace_path,
                 const std::string& obs_path) {
  csr_trace* trace = nullptr;
  csr_status s = csr_simulate_file(config.c_str(), &trace);
  if (s != CSR_OK) return fail_with(s);

  if (!trace_path.empty()) {
    s = csr_trace_save_json(trace, trace_path.c_str());
    if (s != CSR_OK) {
      csr_trace_free(trace);
      return fail_with(s);
    }
  }
  if (!obs_path.empty()) {
    s = csr_trace_save_observations_csv(trace, obs_path.c_str());
    if (s != CSR_OK) {
      csr_trace_free(trace);
      return fail_with(s);
    }
  }

  std::printf("events %zu\n", csr_trace_event_count(trace));
  std::printf("observations %zu\n", csr_trace_observation_count(trace));
  csr_trace_free(trace);
  return 0;
}

int run_eval(const std::string& input, double holdout) {
  if (!(holdout >= 0.0) || holdout >= 1.0) {
    return usage_error("--holdout must lie in [0, 1)");
  }

  csr_dataset* ds = nullptr;
  csr_status s = csr_dataset_load(input.c_str(), &ds);
  if (s != CSR_OK) return fail_with(s);

  // A `<input>.truth.json` sidecar, when present, supplies the reference
  // ordering; otherwise each consumer is scored against its own
  // full-information ranking.
  std::string truth = input + ".truth.json";
  std::error_code ec;
  if (std::filesystem::exists(truth, ec)) {
    s = csr_dataset_load_truth(ds, truth.c_str());
    if (s != CSR_OK) {
      csr_dataset_free(ds);
      return fail_with(s);
    }
  }

  csr_eval_report* report = nullptr;
  s = csr_eval(ds, holdout, &report);
  if (s != CSR_OK) {
    csr_dataset_free(ds);
    return fail_with(s);
  }

  size_t n = csr_eval_consumer_count(report);
  for (size_t i = 0; i < n; ++i) {
    std::printf("%s %s\n", csr_eval_consumer(report, i),
                csr_format_number(csr_eval_cv(report, i)));
  }
  std::printf("mean_cv %s\n", csr_format_number(csr_eval_mean_cv(report)));
  csr_eval_report_free(report);
  csr_dataset_free(ds);
  return 0;
}

int run_gen(uint64_t seed, int services, int consumers, double noise,
            double observe_prob, const std::string& output) {
  if (!(observe_prob > 0.0) || observe_prob > 1.0) {
    return usage_error("--obs-prob must lie in (0, 1]");
  }

  csr_dataset* ds = nullptr;
  csr_status s =
      csr_dataset_generate(seed, services, consumers, noise, observe_prob, &ds);
  if (s != CSR_OK) return fail_with(s);

  s = csr_dataset_save_csv(ds, output.c_str());
  if (s != CSR_OK) {
    csr_dataset_free(ds);
    return fail_with(s);
  }
  std::string truth = output + ".truth.json";
  s = csr_dataset_save_truth(ds, truth.c_str());
  if (s != CSR_OK) {
    csr_dataset_free(ds);
    return fail_with(s);
  }

  std::printf("wrote %s (%zu consumers, %zu services)\n", output.c_str(),
              csr_dataset_consumer_count(ds), csr_dataset_service_count(ds));
  std::printf("wrote %s\n", truth.c_str());
  csr_dataset_free(ds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cloud service rank prediction and load-balancing simulation",
               "csrank"};
  app.set_version_flag("--version", csr_version());
  app.require_subcommand(1);

  int rc = 0;

  std::string rank_input;
  std::string rank_consumer;
  std::vector<std::string> rank_implicit;
  std::string rank_output;
  auto* rank =
      app.add_subcommand("rank", "Predict a service ranking for one consumer");
  rank->add_option("--input", rank_input, "Observation CSV file")->required();
  rank->add_option("--consumer", rank_consumer, "Consumer id to rank for")
      ->required();
  rank->add_option("--implicit", rank_implicit,
                   "Comma-separated services the consumer already relies on")
      ->delimiter(',');
  rank->add_option("--output", rank_output, "Write the ranking JSON here");
  rank->callback(
      [&] { rc = run_rank(rank_input, rank_consumer, rank_implicit, rank_output); });

  std::string sim_config;
  std::string sim_trace;
  std::string sim_obs;
  auto* simulate = app.add_subcommand(
      "simulate", "Run a checkpointed load-balancing simulation");
  simulate->add_option("--config", sim_config, "Simulation config JSON")
      ->required();
  simulate->add_option("--trace", sim_trace, "Write the event trace JSON here");
  simulate->add_option("--observations", sim_obs,
                       "Write the derived observation CSV here");
  simulate->callback([&] { rc = run_simulate(sim_config, sim_trace, sim_obs); });

  std::string eval_input;
  double eval_holdout = 0.0;
  auto* eval = app.add_subcommand(
      "eval", "Score predicted rankings against reference orderings");
  eval->add_option("--input", eval_input, "Observation CSV file")->required();
  eval->add_option("--holdout", eval_holdout,
                   "Fraction of each consumer's services to withhold");
  eval->callback([&] { rc = run_eval(eval_input, eval_holdout); });

  uint64_t gen_seed = 0;
  int gen_services = 10;
  int gen_consumers = 5;
  double gen_noise = 0.0;
  double gen_obs_prob = 0.8;
  std::string gen_output;
  auto* gen =
      app.add_subcommand("gen", "Generate a synthetic observation dataset");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--services", gen_services, "Number of services (>= 2)")
      ->check(CLI::Range(2, 1000000));
  gen->add_option("--consumers", gen_consumers, "Number of consumers (>= 1)")
      ->check(CLI::Range(1, 1000000));
  gen->add_option("--noise", gen_noise, "Latency noise level in [0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--obs-prob", gen_obs_prob,
                  "Probability a consumer samples each service");
  gen->add_option("--output", gen_output, "Observation CSV path")->required();
  gen->callback([&] {
    rc = run_gen(gen_seed, gen_services, gen_consumers, gen_noise, gen_obs_prob,
                 gen_output);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return rc;
}
