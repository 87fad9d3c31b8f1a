#include "csrank/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "csrank/error.hpp"

namespace csrank {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::set<ServiceId> service_set(const Dataset& ds) {
  return std::set<ServiceId>(ds.services.begin(), ds.services.end());
}

const ObservationSet* find_consumer(const Dataset& ds, const ConsumerId& id) {
  for (const auto& obs : ds.consumers) {
    if (obs.consumer == id) return &obs;
  }
  return nullptr;
}

RankingContext make_context(const Dataset& ds, const ConsumerId& consumer,
                            const std::set<ServiceId>& implicit) {
  const ObservationSet* active = find_consumer(ds, consumer);
  if (!active) {
    fail(Errc::unknown_consumer, "unknown consumer '" + consumer + "'");
  }
  RankingContext ctx;
  ctx.active = *active;
  for (const auto& obs : ds.consumers) {
    if (obs.consumer != consumer) ctx.history.push_back(obs);
  }
  ctx.implicit = implicit;
  return ctx;
}

ObservationSet mask_holdout(const ObservationSet& obs, double holdout) {
  if (!(holdout >= 0.0 && holdout <= 1.0)) {
    fail(Errc::invalid_parameter, "holdout must lie in [0, 1]");
  }
  std::size_t k = obs.samples.size();
  auto drop = static_cast<std::size_t>(
      std::floor(holdout * static_cast<double>(k) + 1e-9));
  if (drop == 0) return obs;
  std::vector<std::pair<std::uint64_t, ServiceId>> order;
  order.reserve(k);
  for (const auto& [service, rt] : obs.samples) {
    (void)rt;
    order.emplace_back(fnv1a(obs.consumer + "|" + service), service);
  }
  std::sort(order.begin(), order.end());
  ObservationSet masked;
  masked.consumer = obs.consumer;
  for (std::size_t i = drop; i < order.size(); ++i) {
    masked.samples[order[i].second] = obs.samples.at(order[i].second);
  }
  return masked;
}

EvalReport evaluate_dataset(const Dataset& ds, double holdout) {
  if (!(holdout >= 0.0 && holdout <= 1.0)) {
    fail(Errc::invalid_parameter, "holdout must lie in [0, 1]");
  }
  if (ds.services.size() < 2) {
    fail(Errc::dataset_too_small, "evaluation needs at least 2 services");
  }
  if (ds.consumers.empty()) {
    fail(Errc::dataset_too_small, "evaluation needs at least 1 consumer");
  }
  if (ds.consumers.size() < 2 && !ds.ground_truth) {
    fail(Errc::dataset_too_small,
         "a single consumer can only be scored against ground truth");
  }
  std::set<ServiceId> universe = service_set(ds);
  double denom =
      static_cast<double>(universe.size()) * (universe.size() - 1) / 2.0;
  EvalReport report;
  double sum = 0.0;
  for (const auto& target_consumer : ds.consumers) {
    RankedList truth = ds.ground_truth
                           ? *ds.ground_truth
                           : rank_from_observations(target_consumer, universe);
    RankingContext ctx;
    ctx.active = mask_holdout(target_consumer, holdout);
    for (const auto& obs : ds.consumers) {
      if (obs.consumer != target_consumer.consumer) ctx.history.push_back(obs);
    }
    RankedList predicted = predict_ranking(ctx, universe);
    auto [a, b] = count_pairs(predicted, truth, universe);
    double cv = (static_cast<double>(a) - static_cast<double>(b)) / denom;
    report.per_consumer.push_back({target_consumer.consumer, cv});
    sum += cv;
  }
  report.mean_cv = sum / static_cast<double>(report.per_consumer.size());
  return report;
}

}  // namespace csrank
