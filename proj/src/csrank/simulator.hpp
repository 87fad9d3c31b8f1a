#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csrank/ranking.hpp"

namespace csrank {

// Simulated clock, integer milliseconds. The event loop never touches
// floating point time, which is what makes traces bit-reproducible.
using SimTime = std::int64_t;

struct SubCloudSpec {
  std::string id;
  int capacity = 0;  // resource units, > 0
};

struct JobSpec {
  std::string id;
  std::string consumer;
  ServiceId service;
  SimTime arrival_time = 0;
  SimTime total_work = 0;  // execution ms required, > 0
  int demand = 0;          // resource units held while running, > 0
};

struct FailureSpec {
  std::string subcloud;
  SimTime at = 0;
};

struct SimConfig {
  std::uint64_t seed = 0;  // carried for provenance; the event loop draws nothing
  SimTime checkpoint_interval = 0;
  SimTime checkpoint_overhead = 0;
  double migration_policy_threshold = 1.0;  // load fraction in [0, 1]
  std::vector<SubCloudSpec> subclouds;
  std::vector<JobSpec> jobs;
  std::vector<FailureSpec> failures;
};

enum class JobPhase { pending, queued, running, done };

struct Checkpoint {
  std::string job;
  SimTime taken_at = 0;
  SimTime progress_snapshot = 0;
};

struct SimJob {
  // template
  std::string id;
  std::string consumer;
  ServiceId service;
  SimTime arrival_time = 0;
  SimTime total_work = 0;
  int demand = 0;
  // runtime
  JobPhase phase = JobPhase::pending;
  std::string subcloud;    // placement while queued or running
  SimTime progress = 0;    // committed execution ms as of resumed_at
  SimTime resumed_at = 0;  // wall time from which progress advances again
  std::uint64_t generation = 0;  // scheduled events carrying an older value are stale
  int migrations = 0;
  std::optional<Checkpoint> checkpoint;  // latest only, newer replaces older
  SimTime completion_time = -1;
};

struct SimSubCloud {
  std::string id;
  int capacity = 0;
  int allocated = 0;  // never exceeds capacity at an event boundary
  std::vector<std::size_t> run_queue;  // waiting job indices, FIFO order
};

struct SimState {
  std::vector<SimJob> jobs;
  std::vector<SimSubCloud> subclouds;  // sorted by id
  std::map<std::string, std::size_t> job_index;
  std::map<std::string, std::size_t> subcloud_index;
};

// FIFO discipline: arrival time, then service id, then job id.
bool fifo_before(const SimJob& a, const SimJob& b);

// Execution ms completed by `now`, accounting for any checkpoint-overhead
// window the job is still sitting in.
SimTime progress_at(const SimJob& job, SimTime now);

// Load fraction per sub-cloud, allocated / capacity.
std::map<std::string, double> evaluate_load(const SimState& state);

// Grants the demand only when it fits; a false return means the caller keeps
// the job queued. Demands must be positive.
bool allocate(SimSubCloud& sc, int demand);

// Snapshot of a running job's progress. Replaces the job's previous
// checkpoint; the engine adds the overhead pause separately.
Checkpoint take_checkpoint(SimState& state, const std::string& job_id, SimTime now);

struct RollbackRecord {
  std::string job;
  SimTime from_progress = 0;
  SimTime to_progress = 0;
};

// Fails one sub-cloud at time `at`: every job running there drops back to its
// latest checkpoint snapshot (or to zero) and re-enters the run queue.
std::vector<RollbackRecord> inject_failure(SimState& state,
                                           const std::string& subcloud_id,
                                           SimTime at);

// Moves a running job between sub-clouds. The job resumes from its latest
// checkpoint snapshot (or zero); work since the snapshot is lost in transit.
// On CapacityExceeded the state is left untouched.
void migrate(SimState& state, const std::string& job_id,
             const std::string& from_id, const std::string& to_id);

struct TraceEvent {
  SimTime t = 0;
  std::string kind;  // arrival, start, checkpoint, failure, rollback, migrate, complete
  std::vector<std::pair<std::string, std::string>> ids;     // identifier-valued detail
  std::vector<std::pair<std::string, SimTime>> values;      // millisecond-valued detail
};

struct ObservationRow {
  std::string consumer;
  ServiceId service;
  SimTime response_time_ms = 0;
};

struct SimTrace {
  std::vector<TraceEvent> events;
  std::vector<ObservationRow> observations;  // one per completed job, completion order
  std::map<std::string, int> migration_counts;  // every job, including zero counts
};

// Rejects ill-formed configs before any state exists. Jobs that fit no
// sub-cloud at all are reported here as UnschedulableJob.
void validate_config(const SimConfig& config);

// Builds the initial runtime state for a validated config.
SimState make_state(const SimConfig& config);

// Runs the whole scenario to quiescence and returns the deterministic trace.
SimTrace run(const SimConfig& config);

// Groups completed-job response times by consumer; repeat runs of the same
// service average.
std::vector<ObservationSet> observations_from_trace(const SimTrace& trace);

}  // namespace csrank
