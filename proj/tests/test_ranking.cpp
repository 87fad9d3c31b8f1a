#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "csrank/error.hpp"
#include "csrank/ranking.hpp"
#include "csrank/rng.hpp"
#include "support.hpp"

using namespace csrank;
using testsupport::all_permutations;
using testsupport::ids;
using testsupport::obs_from_order;
using testsupport::oracle_pairs;
using testsupport::to_set;

namespace {

template <typename Fn>
Errc thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::ok;
}

ObservationSet obs(const std::string& consumer,
                   std::vector<std::pair<std::string, double>> samples) {
  ObservationSet o;
  o.consumer = consumer;
  for (auto& [s, rt] : samples) o.samples[s] = rt;
  return o;
}

}  // namespace

TEST_CASE("make_ranked_list inverts ordering into 1-based ranks") {
  RankedList r = make_ranked_list({"b", "a", "c"});
  CHECK(r.rank_of.at("b") == 1);
  CHECK(r.rank_of.at("a") == 2);
  CHECK(r.rank_of.at("c") == 3);
  CHECK(thrown_code([] { make_ranked_list({"a", "a"}); }) ==
        Errc::invalid_parameter);
}

TEST_CASE("rank_from_observations sorts by ascending response time") {
  ObservationSet o = obs("u", {{"s1", 100}, {"s2", 50}, {"s3", 200}});
  RankedList r = rank_from_observations(o, {"s1", "s2", "s3"});
  CHECK(r.ordering == std::vector<ServiceId>{"s2", "s1", "s3"});
}

TEST_CASE("rank_from_observations handles a singleton") {
  ObservationSet o = obs("u", {{"s1", 100}});
  CHECK(rank_from_observations(o, {"s1"}).ordering ==
        std::vector<ServiceId>{"s1"});
}

TEST_CASE("rank_from_observations breaks response-time ties by service id") {
  ObservationSet o = obs("u", {{"s1", 100}, {"s2", 100}});
  CHECK(rank_from_observations(o, {"s1", "s2"}).ordering ==
        std::vector<ServiceId>{"s1", "s2"});

  // The tie-break only matters because both orders have equal inversion
  // counts against any reference; spot-check that symmetry.
  RankedList fwd = make_ranked_list({"s1", "s2"});
  RankedList rev = make_ranked_list({"s2", "s1"});
  RankedList ref = make_ranked_list({"s1", "s2"});
  auto [a1, b1] = count_pairs(fwd, ref, {"s1", "s2"});
  auto [a2, b2] = count_pairs(rev, ref, {"s1", "s2"});
  CHECK(a1 + b1 == a2 + b2);
}

TEST_CASE("rank_from_observations appends unsampled universe members in id order") {
  ObservationSet o = obs("u", {{"s3", 50}});
  RankedList r = rank_from_observations(o, {"s1", "s2", "s3", "s4"});
  CHECK(r.ordering == std::vector<ServiceId>{"s3", "s1", "s2", "s4"});
}

TEST_CASE("rank_from_observations rejects an empty universe") {
  ObservationSet o = obs("u", {{"s1", 100}});
  CHECK(thrown_code([&] { rank_from_observations(o, {}); }) ==
        Errc::empty_universe);
}

TEST_CASE("count_pairs on identical and reversed orderings of 4") {
  RankedList fwd = make_ranked_list({"s1", "s2", "s3", "s4"});
  RankedList rev = make_ranked_list({"s4", "s3", "s2", "s1"});
  std::set<ServiceId> common = {"s1", "s2", "s3", "s4"};
  CHECK(count_pairs(fwd, fwd, common) == std::pair<long long, long long>{6, 0});
  CHECK(count_pairs(fwd, rev, common) == std::pair<long long, long long>{0, 6});
}

TEST_CASE("count_pairs single adjacent swap gives (5, 1)") {
  RankedList r1 = make_ranked_list({"s1", "s2", "s3", "s4"});
  RankedList r2 = make_ranked_list({"s2", "s1", "s3", "s4"});
  CHECK(count_pairs(r1, r2, {"s1", "s2", "s3", "s4"}) ==
        std::pair<long long, long long>{5, 1});
}

TEST_CASE("count_pairs needs at least two common services") {
  RankedList r = make_ranked_list({"s1", "s2"});
  CHECK(thrown_code([&] { count_pairs(r, r, {"s1"}); }) ==
        Errc::insufficient_overlap);
  CHECK(thrown_code([&] { count_pairs(r, r, {}); }) ==
        Errc::insufficient_overlap);
}

TEST_CASE("count_pairs matches the brute-force oracle exhaustively for n <= 5") {
  for (int n = 2; n <= 5; ++n) {
    auto perms = all_permutations(n);
    std::vector<std::string> common = ids(n);
    std::sort(common.begin(), common.end());
    std::set<ServiceId> common_set = to_set(common);
    std::vector<RankedList> lists;
    lists.reserve(perms.size());
    for (const auto& p : perms) lists.push_back(make_ranked_list(p));
    long long total = static_cast<long long>(n) * (n - 1) / 2;
    for (std::size_t i = 0; i < perms.size(); ++i) {
      for (std::size_t j = 0; j < perms.size(); ++j) {
        auto got = count_pairs(lists[i], lists[j], common_set);
        auto want = oracle_pairs(perms[i], perms[j], common);
        REQUIRE(got == want);
        REQUIRE(got.first + got.second == total);
      }
    }
  }
}

TEST_CASE("correspondence_value endpoints over 4 common services") {
  ObservationSet x = obs_from_order("x", {"s1", "s2", "s3", "s4"});
  ObservationSet same = obs_from_order("y", {"s1", "s2", "s3", "s4"});
  ObservationSet rev = obs_from_order("z", {"s4", "s3", "s2", "s1"});
  CorrespondenceValue cv1 = correspondence_value(x, same);
  CHECK(cv1.n == 4);
  CHECK(cv1.a == 6);
  CHECK(cv1.b == 0);
  CHECK(cv1.cv == 1.0);
  CorrespondenceValue cv2 = correspondence_value(x, rev);
  CHECK(cv2.a == 0);
  CHECK(cv2.b == 6);
  CHECK(cv2.cv == -1.0);
}

TEST_CASE("correspondence_value of a single adjacent swap is 4/6") {
  ObservationSet x = obs_from_order("x", {"s1", "s2", "s3", "s4"});
  ObservationSet y = obs_from_order("y", {"s2", "s1", "s3", "s4"});
  CorrespondenceValue cv = correspondence_value(x, y);
  CHECK(cv.a == 5);
  CHECK(cv.b == 1);
  CHECK(cv.cv == doctest::Approx((5.0 - 1.0) / 6.0).epsilon(1e-12));
}

TEST_CASE("correspondence_value uses only the intersection of samples") {
  // Common services are s2 and s3; both consumers order them the same way.
  ObservationSet x = obs("x", {{"s1", 10}, {"s2", 20}, {"s3", 30}});
  ObservationSet y = obs("y", {{"s2", 5}, {"s3", 7}, {"s4", 1}});
  CorrespondenceValue cv = correspondence_value(x, y);
  CHECK(cv.n == 2);
  CHECK(cv.cv == 1.0);
}

TEST_CASE("correspondence_value degenerates to 0 below two common services") {
  ObservationSet x = obs("x", {{"s1", 10}, {"s2", 20}});
  ObservationSet one = obs("y", {{"s2", 5}, {"s9", 1}});
  ObservationSet none = obs("z", {{"s7", 5}});
  CHECK(correspondence_value(x, one).n == 1);
  CHECK(correspondence_value(x, one).cv == 0.0);
  CHECK(correspondence_value(x, none).n == 0);
  CHECK(correspondence_value(x, none).cv == 0.0);
}

TEST_CASE("correspondence_value stays within [-1, 1] and matches the oracle") {
  Rng rng(99);
  std::vector<std::string> pool = ids(6);
  for (int trial = 0; trial < 300; ++trial) {
    ObservationSet x;
    x.consumer = "x";
    ObservationSet y;
    y.consumer = "y";
    for (const auto& s : pool) {
      if (rng.uniform01() < 0.7) x.samples[s] = 1.0 + rng.below(50);
      if (rng.uniform01() < 0.7) y.samples[s] = 1.0 + rng.below(50);
    }
    CorrespondenceValue cv = correspondence_value(x, y);
    CHECK(cv.cv >= -1.0);
    CHECK(cv.cv <= 1.0);
    if (cv.n >= 2) {
      long long total = static_cast<long long>(cv.n) * (cv.n - 1) / 2;
      CHECK(cv.a + cv.b == total);
    }
  }
}

TEST_CASE("select_correspondent_nodes keeps strictly positive cv only") {
  RankingContext ctx;
  ctx.active = obs_from_order("me", {"s1", "s2", "s3", "s4"});
  ctx.history.push_back(obs_from_order("agree", {"s1", "s2", "s3", "s4"}));
  ctx.history.push_back(obs_from_order("oppose", {"s4", "s3", "s2", "s1"}));
  // [s4, s1, s2, s3] has 3 agreements and 3 disagreements against the
  // active order, so its cv is exactly zero.
  ctx.history.push_back(obs_from_order("neutral", {"s4", "s1", "s2", "s3"}));
  CHECK(correspondence_value(ctx.active, ctx.history[2]).cv == 0.0);
  CHECK(select_correspondent_nodes(ctx) == std::vector<ConsumerId>{"agree"});
}

TEST_CASE("select_correspondent_nodes can come back empty") {
  RankingContext ctx;
  ctx.active = obs_from_order("me", {"s1", "s2"});
  ctx.history.push_back(obs_from_order("oppose", {"s2", "s1"}));
  ctx.history.push_back(obs("stranger", {{"s9", 5}}));
  CHECK(select_correspondent_nodes(ctx).empty());
}

TEST_CASE("quality_scores of a single source invert list positions") {
  RankingContext ctx;
  ctx.active = obs("u", {{"s2", 10}, {"s1", 20}, {"s3", 30}});
  ScoreMap s = quality_scores(ctx, {});
  CHECK(s.at("s2") == 3.0);
  CHECK(s.at("s1") == 2.0);
  CHECK(s.at("s3") == 1.0);
}

TEST_CASE("quality_scores average across sources") {
  RankingContext ctx;
  ctx.active = obs("a", {{"s1", 10}, {"s2", 20}});       // ranks s1 first
  ctx.history.push_back(obs("b", {{"s1", 20}, {"s2", 10}}));  // ranks s1 second
  ScoreMap s = quality_scores(ctx, {"b"});
  CHECK(s.at("s1") == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(s.at("s2") == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("quality_scores of two agreeing sources equal either one") {
  RankingContext ctx;
  ctx.active = obs("a", {{"s1", 10}, {"s2", 20}});
  ctx.history.push_back(obs("b", {{"s1", 1}, {"s2", 2}}));
  ScoreMap s = quality_scores(ctx, {"b"});
  CHECK(s.at("s1") == 2.0);
  CHECK(s.at("s2") == 1.0);
}

TEST_CASE("quality_scores cover only services someone observed") {
  RankingContext ctx;
  ctx.active = obs("a", {{"s1", 10}});
  ctx.history.push_back(obs("b", {{"s2", 5}}));
  ScoreMap with_b = quality_scores(ctx, {"b"});
  CHECK(with_b.count("s1") == 1);
  CHECK(with_b.count("s2") == 1);
  ScoreMap without_b = quality_scores(ctx, {});
  CHECK(without_b.count("s2") == 0);
}

TEST_CASE("prefer_value is a plain signed difference") {
  CHECK(prefer_value(4.0, 1.0) == 3.0);
  CHECK(prefer_value(2.5, 2.5) == 0.0);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    double x = rng.range(-10.0, 10.0);
    double y = rng.range(-10.0, 10.0);
    CHECK(prefer_value(x, y) == -prefer_value(y, x));
  }
}

TEST_CASE("preference_matrix two-service case") {
  PreferenceMatrix m = preference_matrix({{"A", 3.0}, {"B", 1.0}});
  CHECK(m.at("A", "B") == 2.0);
  CHECK(m.at("B", "A") == -2.0);
  CHECK(m.at("A", "A") == 0.0);
  CHECK(m.at("B", "B") == 0.0);
}

TEST_CASE("preference_matrix of one service is a 1x1 zero matrix") {
  PreferenceMatrix m = preference_matrix({{"A", 7.0}});
  CHECK(m.services == std::vector<ServiceId>{"A"});
  CHECK(m.at("A", "A") == 0.0);
}

TEST_CASE("preference_matrix rejects an empty score map") {
  CHECK(thrown_code([] { preference_matrix({}); }) == Errc::no_services);
}

TEST_CASE("priority_values of the {A:3,B:2,C:1} fixture") {
  PriorityVector pv =
      priority_values(preference_matrix({{"A", 3.0}, {"B", 2.0}, {"C", 1.0}}));
  CHECK(pv.at("A") == 3.0);
  CHECK(pv.at("B") == 0.0);
  CHECK(pv.at("C") == -3.0);
}

TEST_CASE("priority_values are all zero when scores are equal") {
  PriorityVector pv = priority_values(
      preference_matrix({{"A", 2.0}, {"B", 2.0}, {"C", 2.0}}));
  for (const auto& [s, v] : pv) {
    (void)s;
    CHECK(v == 0.0);
  }
}

TEST_CASE("preference matrix algebra holds over random score vectors") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    ScoreMap scores;
    int n = 1 + static_cast<int>(rng.below(7));
    for (int i = 0; i < n; ++i) {
      // Quantized scores make exact ties common, which the tie handling
      // must survive.
      scores[ids(7)[i]] = 0.25 * static_cast<double>(rng.below(40));
    }
    PreferenceMatrix m = preference_matrix(scores);
    std::size_t k = m.services.size();
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(m.p[i * k + i] == 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        CHECK(m.p[i * k + j] == -m.p[j * k + i]);
      }
    }
    PriorityVector pv = priority_values(m);
    double total = 0.0;
    for (const auto& [s, v] : pv) {
      (void)s;
      total += v;
    }
    CHECK(std::abs(total) <= 1e-9);

    RankedList r = assemble_ranking(pv, {});
    for (std::size_t i = 0; i + 1 < r.ordering.size(); ++i) {
      CHECK(pv.at(r.ordering[i]) >= pv.at(r.ordering[i + 1]) - 1e-9);
    }
  }
}

TEST_CASE("constant score shifts leave the whole pipeline bit-identical") {
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    ScoreMap scores;
    int n = 2 + static_cast<int>(rng.below(6));
    for (int i = 0; i < n; ++i) {
      scores[ids(8)[i]] = 0.5 * static_cast<double>(rng.below(16));
    }
    double shift = 0.5 * static_cast<double>(rng.below(20));
    ScoreMap shifted = scores;
    for (auto& [s, v] : shifted) {
      (void)s;
      v += shift;
    }
    PreferenceMatrix m1 = preference_matrix(scores);
    PreferenceMatrix m2 = preference_matrix(shifted);
    CHECK(m1.p == m2.p);
    CHECK(priority_values(m1) == priority_values(m2));
    CHECK(assemble_ranking(priority_values(m1), {}).ordering ==
          assemble_ranking(priority_values(m2), {}).ordering);
  }
}

TEST_CASE("assemble_ranking sorts by descending priority") {
  RankedList r = assemble_ranking({{"A", 3.0}, {"B", 0.0}, {"C", -3.0}}, {});
  CHECK(r.ordering == std::vector<ServiceId>{"A", "B", "C"});
}

TEST_CASE("assemble_ranking puts implicit services first inside a tie") {
  RankedList r = assemble_ranking({{"A", 0.0}, {"B", 0.0}}, {"B"});
  CHECK(r.ordering == std::vector<ServiceId>{"B", "A"});
  RankedList r3 =
      assemble_ranking({{"A", 1.0}, {"B", 1.0}, {"C", 1.0}}, {"C"});
  CHECK(r3.ordering == std::vector<ServiceId>{"C", "A", "B"});
}

TEST_CASE("assemble_ranking does not let implicit cross a real priority gap") {
  RankedList r = assemble_ranking({{"A", 5.0}, {"B", 0.0}}, {"B"});
  CHECK(r.ordering == std::vector<ServiceId>{"A", "B"});
}

TEST_CASE("assemble_ranking handles a singleton and rejects empty input") {
  CHECK(assemble_ranking({{"A", 5.0}}, {}).ordering ==
        std::vector<ServiceId>{"A"});
  CHECK(thrown_code([] { assemble_ranking({}, {}); }) == Errc::no_services);
}

TEST_CASE("predict_ranking with no history equals a direct sort") {
  RankingContext ctx;
  ctx.active = obs("u", {{"s1", 100}, {"s2", 50}});
  RankedList r = predict_ranking(ctx, {"s1", "s2"});
  CHECK(r.ordering == std::vector<ServiceId>{"s2", "s1"});
}

TEST_CASE("predict_ranking follows a perfectly correlated correspondent") {
  RankingContext ctx;
  ctx.active = obs_from_order("me", {"s3", "s1", "s4", "s2"});
  ctx.history.push_back(obs_from_order("friend", {"s3", "s1", "s4", "s2"}));
  RankedList r = predict_ranking(ctx, to_set(ids(4)));
  CHECK(r.ordering == std::vector<ServiceId>{"s3", "s1", "s4", "s2"});
}

TEST_CASE("predict_ranking ignores an anti-correlated consumer") {
  RankingContext with;
  with.active = obs_from_order("me", {"s2", "s4", "s1", "s3"});
  with.history.push_back(obs_from_order("foe", {"s3", "s1", "s4", "s2"}));
  RankingContext without;
  without.active = with.active;
  std::set<ServiceId> universe = to_set(ids(4));
  CHECK(predict_ranking(with, universe).ordering ==
        predict_ranking(without, universe).ordering);
}

TEST_CASE("predict_ranking appends universe members nobody scored") {
  RankingContext ctx;
  ctx.active = obs("me", {{"s2", 10}, {"s3", 20}});
  ctx.history.push_back(obs("friend", {{"s2", 1}, {"s3", 2}}));
  RankedList r = predict_ranking(ctx, {"s1", "s2", "s3", "s4"});
  CHECK(r.ordering == std::vector<ServiceId>{"s2", "s3", "s1", "s4"});
}

TEST_CASE("predict_ranking restricts scored services to the universe") {
  RankingContext ctx;
  ctx.active = obs("me", {{"s1", 30}, {"s2", 10}, {"s3", 20}});
  ctx.history.push_back(obs("friend", {{"s1", 30}, {"s2", 10}, {"s3", 20}}));
  RankedList r = predict_ranking(ctx, {"s2", "s3"});
  CHECK(r.ordering == std::vector<ServiceId>{"s2", "s3"});
}

TEST_CASE("predict_ranking validates universe and implicit set") {
  RankingContext ctx;
  ctx.active = obs("me", {{"s1", 10}});
  CHECK(thrown_code([&] { predict_ranking(ctx, {}); }) == Errc::empty_universe);
  ctx.implicit = {"s9"};
  CHECK(thrown_code([&] { predict_ranking(ctx, {"s1"}); }) ==
        Errc::invalid_parameter);
}

TEST_CASE("predict_ranking is deterministic") {
  RankingContext ctx;
  ctx.active = obs_from_order("me", {"s1", "s3", "s2"});
  ctx.history.push_back(obs_from_order("h1", {"s3", "s1", "s2"}));
  ctx.history.push_back(obs_from_order("h2", {"s1", "s2", "s3"}));
  std::set<ServiceId> universe = to_set(ids(3));
  RankedList first = predict_ranking(ctx, universe);
  for (int i = 0; i < 5; ++i) {
    CHECK(predict_ranking(ctx, universe).ordering == first.ordering);
  }
}

TEST_CASE("predict_with_priorities matches predict_ranking on random contexts") {
  Rng rng(7);
  std::vector<std::string> pool = ids(6);
  std::set<ServiceId> universe = to_set(pool);
  for (int trial = 0; trial < 300; ++trial) {
    RankingContext ctx;
    ctx.active.consumer = "me";
    for (const auto& s : pool) {
      if (rng.uniform01() < 0.7) {
        ctx.active.samples[s] = 1.0 + static_cast<double>(rng.below(40));
      }
    }
    int n_hist = static_cast<int>(rng.below(4));
    for (int h = 0; h < n_hist; ++h) {
      ObservationSet past;
      past.consumer = "h" + std::to_string(h);
      for (const auto& s : pool) {
        if (rng.uniform01() < 0.7) {
          past.samples[s] = 1.0 + static_cast<double>(rng.below(40));
        }
      }
      ctx.history.push_back(std::move(past));
    }
    for (const auto& [s, rt] : ctx.active.samples) {
      (void)rt;
      if (rng.uniform01() < 0.3) ctx.implicit.insert(s);
    }

    RankedList plain = predict_ranking(ctx, universe);
    auto [list, pv] = predict_with_priorities(ctx, universe);
    REQUIRE(list.ordering == plain.ordering);
    REQUIRE(pv.size() == universe.size());
    for (const auto& s : list.ordering) REQUIRE(pv.count(s) == 1);
  }
}
