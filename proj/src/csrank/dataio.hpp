#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csrank/ranking.hpp"
#include "csrank/simulator.hpp"

namespace csrank {

struct Dataset {
  std::vector<ServiceId> services;        // sorted, unique
  std::vector<ObservationSet> consumers;  // sorted by consumer id
  std::optional<RankedList> ground_truth; // permutation of services when present
};

// Decimal rendering shared by every writer: up to 6 fractional digits with
// trailing zeros trimmed. Writing all numbers through one door is what makes
// reruns byte-identical.
std::string format_number(double v);

// Observation CSV. Header must read exactly
// consumer_id,service_id,response_time_ms; UTF-8 with LF line endings.
Dataset load_observations(const std::string& path);
void save_observations(const std::vector<ObservationSet>& consumers,
                       const std::string& path);
void save_observations(const Dataset& ds, const std::string& path);

// Ranking JSON: ordering, priority_values, generated_by. The ranking and the
// priority vector must cover the same services; that is checked before any
// byte is written.
void save_ranking(const RankedList& r, const PriorityVector& pv,
                  const std::string& path);

// Reads the ordering array out of any of our JSON documents.
RankedList load_ranking(const std::string& path);

// Ground-truth sidecar: ordering plus the generator version.
void save_ground_truth(const RankedList& r, const std::string& path);

// Seeded dataset with a planted quality ordering. Base latencies grow
// geometrically with ground-truth position and noise is multiplicative
// lognormal, calibrated so an adjacent pair swaps order with the requested
// probability. Consumers see each service with probability observe_prob.
Dataset generate_synthetic(std::uint64_t seed, int n_services, int n_consumers,
                           double noise, double observe_prob = 0.8);

// Simulator config JSON, keys mirroring the SimConfig fields.
SimConfig load_sim_config(const std::string& path);

// Trace JSON: events, observations, migration_counts.
void save_trace(const SimTrace& trace, const std::string& path);

// Observation CSV derived from a trace via observations_from_trace.
void save_trace_observations(const SimTrace& trace, const std::string& path);

}  // namespace csrank
