#pragma once

#include <set>
#include <string>
#include <vector>

#include "csrank/dataio.hpp"
#include "csrank/ranking.hpp"

namespace csrank {

struct ConsumerScore {
  ConsumerId consumer;
  double cv = 0.0;
};

struct EvalReport {
  std::vector<ConsumerScore> per_consumer;
  double mean_cv = 0.0;
};

std::set<ServiceId> service_set(const Dataset& ds);

// Null when the dataset holds no such consumer.
const ObservationSet* find_consumer(const Dataset& ds, const ConsumerId& id);

// Active consumer plus everyone else as history. Throws UnknownConsumer.
RankingContext make_context(const Dataset& ds, const ConsumerId& consumer,
                            const std::set<ServiceId>& implicit);

// Copy of the observation set with floor(holdout * samples) services removed.
// Selection is by hash of consumer and service, so it is reproducible without
// carrying a seed around.
ObservationSet mask_holdout(const ObservationSet& obs, double holdout);

// Scores every consumer: predict from a holdout-masked copy of its own
// observations plus everyone else's full ones, then measure agreement with
// ground truth over the whole service set. Without ground truth the
// consumer's own full-information ranking stands in, which needs at least one
// other consumer to make the exercise meaningful.
EvalReport evaluate_dataset(const Dataset& ds, double holdout);

}  // namespace csrank
