#pragma once

// Helpers shared by the test binaries: an independent pair-counting oracle
// kept deliberately separate from the library code, plus small fixture
// builders.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "csrank/ranking.hpp"

namespace testsupport {

inline std::map<std::string, int> positions(
    const std::vector<std::string>& ordering) {
  std::map<std::string, int> pos;
  for (int i = 0; i < static_cast<int>(ordering.size()); ++i) {
    pos[ordering[i]] = i;
  }
  return pos;
}

// Plain double loop over unordered pairs of `common`, counting agreements and
// disagreements between the two orderings. Shares no code with count_pairs.
inline std::pair<long long, long long> oracle_pairs(
    const std::vector<std::string>& order1,
    const std::vector<std::string>& order2,
    const std::vector<std::string>& common) {
  std::map<std::string, int> p1 = positions(order1);
  std::map<std::string, int> p2 = positions(order2);
  long long agree = 0;
  long long disagree = 0;
  for (std::size_t i = 0; i < common.size(); ++i) {
    for (std::size_t j = i + 1; j < common.size(); ++j) {
      bool first1 = p1[common[i]] < p1[common[j]];
      bool first2 = p2[common[i]] < p2[common[j]];
      if (first1 == first2) {
        ++agree;
      } else {
        ++disagree;
      }
    }
  }
  return {agree, disagree};
}

// Observation set whose response times reproduce `ordering` when sorted
// ascending: position i gets 10 + i milliseconds.
inline csrank::ObservationSet obs_from_order(
    const std::string& consumer, const std::vector<std::string>& ordering) {
  csrank::ObservationSet obs;
  obs.consumer = consumer;
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    obs.samples[ordering[i]] = 10.0 + static_cast<double>(i);
  }
  return obs;
}

inline std::vector<std::string> ids(int n, const std::string& stem = "s") {
  std::vector<std::string> v;
  v.reserve(n);
  for (int i = 1; i <= n; ++i) v.push_back(stem + std::to_string(i));
  return v;
}

inline std::set<std::string> to_set(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

inline std::vector<std::vector<std::string>> all_permutations(int n) {
  std::vector<std::string> base = ids(n);
  std::sort(base.begin(), base.end());
  std::vector<std::vector<std::string>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

}  // namespace testsupport
