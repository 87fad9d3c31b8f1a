#include "csrank/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "csrank/error.hpp"

namespace csrank {

RankedList make_ranked_list(std::vector<ServiceId> ordering) {
  RankedList r;
  r.ordering = std::move(ordering);
  for (std::size_t i = 0; i < r.ordering.size(); ++i) {
    auto [it, inserted] = r.rank_of.emplace(r.ordering[i], static_cast<int>(i) + 1);
    if (!inserted) {
      fail(Errc::invalid_parameter,
           "ranked list repeats service '" + r.ordering[i] + "'");
    }
  }
  return r;
}

double PreferenceMatrix::at(const ServiceId& x, const ServiceId& y) const {
  auto ix = index.find(x);
  auto iy = index.find(y);
  if (ix == index.end() || iy == index.end()) {
    fail(Errc::invalid_parameter, "service not present in preference matrix");
  }
  return p[ix->second * services.size() + iy->second];
}

RankedList rank_from_observations(const ObservationSet& obs,
                                  const std::set<ServiceId>& universe) {
  if (universe.empty()) {
    fail(Errc::empty_universe, "cannot rank over an empty service universe");
  }
  std::vector<ServiceId> sampled;
  std::vector<ServiceId> unsampled;
  for (const auto& s : universe) {
    if (obs.samples.count(s)) {
      sampled.push_back(s);
    } else {
      unsampled.push_back(s);
    }
  }
  std::sort(sampled.begin(), sampled.end(),
            [&](const ServiceId& x, const ServiceId& y) {
              double rx = obs.samples.at(x);
              double ry = obs.samples.at(y);
              if (rx != ry) return rx < ry;
              return x < y;
            });
  // unsampled is already in id order because universe is an ordered set
  sampled.insert(sampled.end(), unsampled.begin(), unsampled.end());
  return make_ranked_list(std::move(sampled));
}

std::pair<long long, long long> count_pairs(const RankedList& r1,
                                            const RankedList& r2,
                                            const std::set<ServiceId>& common) {
  if (common.size() < 2) {
    fail(Errc::insufficient_overlap,
         "pair counting needs at least 2 common services, got " +
             std::to_string(common.size()));
  }
  std::vector<std::pair<int, int>> positions;  // (rank in r1, rank in r2)
  positions.reserve(common.size());
  for (const auto& s : common) {
    auto p1 = r1.rank_of.find(s);
    auto p2 = r2.rank_of.find(s);
    if (p1 == r1.rank_of.end() || p2 == r2.rank_of.end()) {
      fail(Errc::invalid_parameter,
           "common service '" + s + "' is missing from a ranked list");
    }
    positions.emplace_back(p1->second, p2->second);
  }
  long long a = 0;
  long long b = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      bool before1 = positions[i].first < positions[j].first;
      bool before2 = positions[i].second < positions[j].second;
      if (before1 == before2) {
        ++a;
      } else {
        ++b;
      }
    }
  }
  return {a, b};
}

CorrespondenceValue correspondence_value(const ObservationSet& x,
                                         const ObservationSet& y) {
  std::set<ServiceId> common;
  for (const auto& [s, rt] : x.samples) {
    (void)rt;
    if (y.samples.count(s)) common.insert(s);
  }
  CorrespondenceValue out;
  out.n = static_cast<int>(common.size());
  if (out.n < 2) {
    // No comparable pair exists, so the consumers neither agree nor disagree.
    return out;
  }
  RankedList rx = rank_from_observations(x, common);
  RankedList ry = rank_from_observations(y, common);
  auto [a, b] = count_pairs(rx, ry, common);
  out.a = a;
  out.b = b;
  double total = static_cast<double>(out.n) * (out.n - 1) / 2.0;
  out.cv = (static_cast<double>(a) - static_cast<double>(b)) / total;
  return out;
}

std::vector<ConsumerId> select_correspondent_nodes(const RankingContext& ctx) {
  std::vector<ConsumerId> out;
  for (const auto& past : ctx.history) {
    if (correspondence_value(ctx.active, past).cv > 0.0) {
      out.push_back(past.consumer);
    }
  }
  return out;
}

ScoreMap quality_scores(const RankingContext& ctx,
                        const std::vector<ConsumerId>& correspondents) {
  std::vector<const ObservationSet*> sources;
  sources.push_back(&ctx.active);
  for (const auto& name : correspondents) {
    for (const auto& past : ctx.history) {
      if (past.consumer == name) sources.push_back(&past);
    }
  }
  std::map<ServiceId, std::pair<double, int>> acc;  // sum, source count
  for (const ObservationSet* src : sources) {
    if (src->samples.empty()) continue;
    std::set<ServiceId> own;
    for (const auto& [s, rt] : src->samples) {
      (void)rt;
      own.insert(s);
    }
    RankedList r = rank_from_observations(*src, own);
    int n = static_cast<int>(r.ordering.size());
    for (const auto& [s, pos] : r.rank_of) {
      auto& slot = acc[s];
      slot.first += static_cast<double>(n - pos + 1);
      slot.second += 1;
    }
  }
  ScoreMap scores;
  for (const auto& [s, slot] : acc) {
    scores[s] = slot.first / slot.second;
  }
  return scores;
}

double prefer_value(double score_x, double score_y) {
  return score_x - score_y;
}

PreferenceMatrix preference_matrix(const ScoreMap& scores) {
  if (scores.empty()) {
    fail(Errc::no_services, "cannot build a preference matrix with no services");
  }
  PreferenceMatrix m;
  for (const auto& [s, score] : scores) {
    (void)score;
    m.index.emplace(s, m.services.size());
    m.services.push_back(s);
  }
  std::size_t n = m.services.size();
  m.p.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m.p[i * n + j] =
          prefer_value(scores.at(m.services[i]), scores.at(m.services[j]));
    }
  }
  return m;
}

PriorityVector priority_values(const PreferenceMatrix& m) {
  PriorityVector pv;
  std::size_t n = m.services.size();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += m.p[i * n + j];
    }
    pv[m.services[i]] = sum;
  }
  return pv;
}

RankedList assemble_ranking(const PriorityVector& pv,
                            const std::set<ServiceId>& implicit) {
  if (pv.empty()) {
    fail(Errc::no_services, "cannot assemble a ranking with no services");
  }
  std::vector<ServiceId> order;
  order.reserve(pv.size());
  for (const auto& [s, v] : pv) {
    (void)v;
    order.push_back(s);
  }
  std::sort(order.begin(), order.end(),
            [&](const ServiceId& x, const ServiceId& y) {
              double vx = pv.at(x);
              double vy = pv.at(y);
              if (vx != vy) return vx > vy;
              return x < y;
            });
  // Rework each run of near-equal priorities: implicit services move to the
  // run's front, id order settles the rest. Runs are maximal chains whose
  // adjacent values differ by at most kScoreEps.
  std::size_t lo = 0;
  while (lo < order.size()) {
    std::size_t hi = lo + 1;
    while (hi < order.size() &&
           std::abs(pv.at(order[hi - 1]) - pv.at(order[hi])) <= kScoreEps) {
      ++hi;
    }
    std::sort(order.begin() + lo, order.begin() + hi,
              [&](const ServiceId& x, const ServiceId& y) {
                bool ix = implicit.count(x) > 0;
                bool iy = implicit.count(y) > 0;
                if (ix != iy) return ix;
                return x < y;
              });
    lo = hi;
  }
  return make_ranked_list(std::move(order));
}

namespace {

void check_implicit(const RankingContext& ctx) {
  for (const auto& s : ctx.implicit) {
    if (!ctx.active.samples.count(s)) {
      fail(Errc::invalid_parameter,
           "implicit service '" + s + "' was never sampled by consumer '" +
               ctx.active.consumer + "'");
    }
  }
}

}  // namespace

RankedList predict_ranking(const RankingContext& ctx,
                           const std::set<ServiceId>& universe) {
  if (universe.empty()) {
    fail(Errc::empty_universe, "cannot predict over an empty service universe");
  }
  check_implicit(ctx);
  std::vector<ConsumerId> correspondents = select_correspondent_nodes(ctx);
  if (correspondents.empty()) {
    return rank_from_observations(ctx.active, universe);
  }
  ScoreMap scores = quality_scores(ctx, correspondents);
  PreferenceMatrix m = preference_matrix(scores);
  PriorityVector pv = priority_values(m);
  RankedList full = assemble_ranking(pv, ctx.implicit);

  // Restrict to the requested universe, then append whatever the pipeline
  // never scored. Appended services carry no evidence, so id order is the
  // only defensible arrangement.
  std::vector<ServiceId> order;
  for (const auto& s : full.ordering) {
    if (universe.count(s)) order.push_back(s);
  }
  for (const auto& s : universe) {
    if (!full.rank_of.count(s)) order.push_back(s);
  }
  return make_ranked_list(std::move(order));
}

std::pair<RankedList, PriorityVector> predict_with_priorities(
    const RankingContext& ctx, const std::set<ServiceId>& universe) {
  if (universe.empty()) {
    fail(Errc::empty_universe, "cannot predict over an empty service universe");
  }
  check_implicit(ctx);
  ScoreMap scores = quality_scores(ctx, select_correspondent_nodes(ctx));
  ScoreMap padded;
  for (const auto& s : universe) {
    auto it = scores.find(s);
    padded[s] = it == scores.end() ? 0.0 : it->second;
  }
  PreferenceMatrix m = preference_matrix(padded);
  PriorityVector pv = priority_values(m);
  RankedList list = assemble_ranking(pv, ctx.implicit);
  return {std::move(list), std::move(pv)};
}

}  // namespace csrank
