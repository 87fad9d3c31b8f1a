#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace csrank {

using ServiceId = std::string;
using ConsumerId = std::string;

// Tolerance for every real-valued equality test in the ranking pipeline.
inline constexpr double kScoreEps = 1e-9;

// One consumer's observed response times. At most one sample per service;
// every sample is finite and strictly positive (enforced at the I/O border).
struct ObservationSet {
  ConsumerId consumer;
  std::map<ServiceId, double> samples;  // response time in milliseconds
};

// A strict total order over a set of services. ordering[0] is rank 1 and
// rank_of is its exact inverse, so both views always agree.
struct RankedList {
  std::vector<ServiceId> ordering;
  std::map<ServiceId, int> rank_of;
};

RankedList make_ranked_list(std::vector<ServiceId> ordering);

// Pairwise agreement between two consumers' orderings: n jointly observed
// services, a concordant pairs, b discordant pairs, cv in [-1, 1].
struct CorrespondenceValue {
  int n = 0;
  long long a = 0;
  long long b = 0;
  double cv = 0.0;
};

// Dense antisymmetric matrix of score differences, indexed by service id.
struct PreferenceMatrix {
  std::vector<ServiceId> services;  // sorted by id
  std::map<ServiceId, std::size_t> index;
  std::vector<double> p;  // row-major, p[i * services.size() + j]

  double at(const ServiceId& x, const ServiceId& y) const;
};

using ScoreMap = std::map<ServiceId, double>;
using PriorityVector = std::map<ServiceId, double>;

// Everything the predictor needs about one active consumer: its own samples,
// the other consumers' observation history, and the services it has already
// accessed (these win priority ties). implicit must be a subset of the
// services sampled by active.
struct RankingContext {
  ObservationSet active;
  std::vector<ObservationSet> history;
  std::set<ServiceId> implicit;
};

// Orders the universe by the consumer's observed response times, fastest
// first, ties by service id. Universe members without a sample are appended
// after all sampled services, in id order.
RankedList rank_from_observations(const ObservationSet& obs,
                                  const std::set<ServiceId>& universe);

// Counts concordant and discordant unordered pairs over `common`, which must
// be part of both lists and hold at least two services.
std::pair<long long, long long> count_pairs(const RankedList& r1,
                                            const RankedList& r2,
                                            const std::set<ServiceId>& common);

// Agreement between two consumers over the services both sampled. Fewer than
// two common services yields cv = 0: no pair evidence, no correspondence.
CorrespondenceValue correspondence_value(const ObservationSet& x,
                                         const ObservationSet& y);

// Historical consumers whose correspondence with the active consumer is
// strictly positive; zero is excluded. Order follows ctx.history.
std::vector<ConsumerId> select_correspondent_nodes(const RankingContext& ctx);

// Per-service quality: each source (the active consumer plus every listed
// correspondent) scores its own ranked samples as n - position + 1, so the
// best service in a list of n gets n. A service's score is the mean over the
// sources that observed it.
ScoreMap quality_scores(const RankingContext& ctx,
                        const std::vector<ConsumerId>& correspondents);

// Signed preference of x over y; positive means x is the better service.
double prefer_value(double score_x, double score_y);

PreferenceMatrix preference_matrix(const ScoreMap& scores);

// Row sums of the preference matrix. Antisymmetry makes the values total
// zero, up to kScoreEps.
PriorityVector priority_values(const PreferenceMatrix& m);

// Descending priority order. Within a tie run, implicit services come first,
// then everything falls back to id order.
RankedList assemble_ranking(const PriorityVector& pv,
                            const std::set<ServiceId>& implicit);

// Full pipeline: filter correspondents, score, build the preference matrix,
// sum priorities, assemble. With no correspondents the result degrades to
// rank_from_observations on the active consumer alone. Universe members the
// pipeline never scored are appended in id order.
RankedList predict_ranking(const RankingContext& ctx,
                           const std::set<ServiceId>& universe);

// Same prediction, but also reports a priority value for every ranked
// service. Universe members nobody scored enter the matrix with a score of
// zero; real scores are always at least 1, so the predicted order matches
// predict_ranking exactly.
std::pair<RankedList, PriorityVector> predict_with_priorities(
    const RankingContext& ctx, const std::set<ServiceId>& universe);

}  // namespace csrank
