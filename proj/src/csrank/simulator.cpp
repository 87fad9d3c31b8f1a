#include "csrank/simulator.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <set>

#include "csrank/error.hpp"

namespace csrank {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

void enqueue_fifo(SimState& state, SimSubCloud& sc, std::size_t job_idx) {
  auto pos = std::upper_bound(sc.run_queue.begin(), sc.run_queue.end(), job_idx,
                              [&](std::size_t a, std::size_t b) {
                                return fifo_before(state.jobs[a], state.jobs[b]);
                              });
  sc.run_queue.insert(pos, job_idx);
}

}  // namespace

bool fifo_before(const SimJob& a, const SimJob& b) {
  if (a.arrival_time != b.arrival_time) return a.arrival_time < b.arrival_time;
  if (a.service != b.service) return a.service < b.service;
  return a.id < b.id;
}

SimTime progress_at(const SimJob& job, SimTime now) {
  if (job.phase != JobPhase::running) return job.progress;
  // Inside a checkpoint-overhead window resumed_at lies in the future and the
  // job has not moved past its committed progress.
  SimTime advanced = now > job.resumed_at ? now - job.resumed_at : 0;
  SimTime p = job.progress + advanced;
  return p > job.total_work ? job.total_work : p;
}

std::map<std::string, double> evaluate_load(const SimState& state) {
  std::map<std::string, double> load;
  for (const auto& sc : state.subclouds) {
    load[sc.id] = static_cast<double>(sc.allocated) / sc.capacity;
  }
  return load;
}

bool allocate(SimSubCloud& sc, int demand) {
  if (demand <= 0) {
    fail(Errc::invalid_parameter, "allocation demand must be positive");
  }
  if (sc.allocated + demand > sc.capacity) return false;
  sc.allocated += demand;
  return true;
}

Checkpoint take_checkpoint(SimState& state, const std::string& job_id,
                           SimTime now) {
  auto it = state.job_index.find(job_id);
  if (it == state.job_index.end()) {
    fail(Errc::invalid_parameter, "unknown job '" + job_id + "'");
  }
  SimJob& job = state.jobs[it->second];
  if (job.phase != JobPhase::running) {
    fail(Errc::not_running,
         "cannot checkpoint job '" + job_id + "': job is not running");
  }
  Checkpoint cp;
  cp.job = job_id;
  cp.taken_at = now;
  cp.progress_snapshot = progress_at(job, now);
  job.checkpoint = cp;
  return cp;
}

std::vector<RollbackRecord> inject_failure(SimState& state,
                                           const std::string& subcloud_id,
                                           SimTime at) {
  auto it = state.subcloud_index.find(subcloud_id);
  if (it == state.subcloud_index.end()) {
    fail(Errc::unknown_subcloud, "unknown sub-cloud '" + subcloud_id + "'");
  }
  SimSubCloud& sc = state.subclouds[it->second];
  std::vector<std::size_t> running;
  for (std::size_t i = 0; i < state.jobs.size(); ++i) {
    const SimJob& j = state.jobs[i];
    if (j.phase == JobPhase::running && j.subcloud == subcloud_id) {
      running.push_back(i);
    }
  }
  std::sort(running.begin(), running.end(), [&](std::size_t x, std::size_t y) {
    return fifo_before(state.jobs[x], state.jobs[y]);
  });
  std::vector<RollbackRecord> records;
  for (std::size_t idx : running) {
    SimJob& job = state.jobs[idx];
    RollbackRecord rec;
    rec.job = job.id;
    rec.from_progress = progress_at(job, at);
    rec.to_progress = job.checkpoint ? job.checkpoint->progress_snapshot : 0;
    job.progress = rec.to_progress;
    job.phase = JobPhase::queued;
    job.generation += 1;
    sc.allocated -= job.demand;
    enqueue_fifo(state, sc, idx);
    records.push_back(rec);
  }
  return records;
}

void migrate(SimState& state, const std::string& job_id,
             const std::string& from_id, const std::string& to_id) {
  auto jit = state.job_index.find(job_id);
  if (jit == state.job_index.end()) {
    fail(Errc::invalid_parameter, "unknown job '" + job_id + "'");
  }
  auto fit = state.subcloud_index.find(from_id);
  auto tit = state.subcloud_index.find(to_id);
  if (fit == state.subcloud_index.end()) {
    fail(Errc::unknown_subcloud, "unknown sub-cloud '" + from_id + "'");
  }
  if (tit == state.subcloud_index.end()) {
    fail(Errc::unknown_subcloud, "unknown sub-cloud '" + to_id + "'");
  }
  if (from_id == to_id) {
    fail(Errc::invalid_parameter,
         "migration source and destination are both '" + from_id + "'");
  }
  SimJob& job = state.jobs[jit->second];
  if (job.phase != JobPhase::running) {
    fail(Errc::not_running,
         "cannot migrate job '" + job_id + "': job is not running");
  }
  if (job.subcloud != from_id) {
    fail(Errc::invalid_parameter,
         "job '" + job_id + "' is not running on sub-cloud '" + from_id + "'");
  }
  SimSubCloud& to = state.subclouds[tit->second];
  if (to.allocated + job.demand > to.capacity) {
    fail(Errc::capacity_exceeded,
         "sub-cloud '" + to_id + "' cannot take job '" + job_id + "': demand " +
             std::to_string(job.demand) + ", free " +
             std::to_string(to.capacity - to.allocated));
  }
  SimSubCloud& from = state.subclouds[fit->second];
  from.allocated -= job.demand;
  job.progress = job.checkpoint ? job.checkpoint->progress_snapshot : 0;
  job.phase = JobPhase::queued;
  job.subcloud = to_id;
  job.generation += 1;
  job.migrations += 1;
  enqueue_fifo(state, to, jit->second);
}

void validate_config(const SimConfig& config) {
  if (config.checkpoint_interval <= 0) {
    fail(Errc::invalid_value, "checkpoint_interval must be positive");
  }
  if (config.checkpoint_overhead < 0) {
    fail(Errc::invalid_value, "checkpoint_overhead must not be negative");
  }
  if (!(config.migration_policy_threshold >= 0.0 &&
        config.migration_policy_threshold <= 1.0)) {
    fail(Errc::invalid_value, "migration_policy_threshold must lie in [0, 1]");
  }
  std::set<std::string> subcloud_ids;
  int max_capacity = 0;
  for (const auto& sc : config.subclouds) {
    if (sc.id.empty()) fail(Errc::invalid_value, "sub-cloud id must not be empty");
    if (!subcloud_ids.insert(sc.id).second) {
      fail(Errc::invalid_value, "duplicate sub-cloud id '" + sc.id + "'");
    }
    if (sc.capacity <= 0) {
      fail(Errc::invalid_value,
           "sub-cloud '" + sc.id + "' capacity must be positive");
    }
    max_capacity = std::max(max_capacity, sc.capacity);
  }
  std::set<std::string> job_ids;
  for (const auto& j : config.jobs) {
    if (j.id.empty()) fail(Errc::invalid_value, "job id must not be empty");
    if (!job_ids.insert(j.id).second) {
      fail(Errc::invalid_value, "duplicate job id '" + j.id + "'");
    }
    if (j.consumer.empty() || j.service.empty()) {
      fail(Errc::invalid_value,
           "job '" + j.id + "' needs a consumer and a service");
    }
    if (j.total_work <= 0) {
      fail(Errc::invalid_value, "job '" + j.id + "' total_work must be positive");
    }
    if (j.demand <= 0) {
      fail(Errc::invalid_value, "job '" + j.id + "' demand must be positive");
    }
    if (j.arrival_time < 0) {
      fail(Errc::invalid_value,
           "job '" + j.id + "' arrival_time must not be negative");
    }
  }
  for (const auto& j : config.jobs) {
    if (j.demand > max_capacity) {
      fail(Errc::unschedulable_job,
           "job '" + j.id + "': demand " + std::to_string(j.demand) +
               " exceeds every sub-cloud capacity");
    }
  }
  for (const auto& f : config.failures) {
    if (!subcloud_ids.count(f.subcloud)) {
      fail(Errc::unknown_subcloud,
           "failure references unknown sub-cloud '" + f.subcloud + "'");
    }
    if (f.at < 0) {
      fail(Errc::invalid_value, "failure time must not be negative");
    }
  }
}

SimState make_state(const SimConfig& config) {
  SimState state;
  for (const auto& spec : config.jobs) {
    SimJob job;
    job.id = spec.id;
    job.consumer = spec.consumer;
    job.service = spec.service;
    job.arrival_time = spec.arrival_time;
    job.total_work = spec.total_work;
    job.demand = spec.demand;
    state.job_index.emplace(job.id, state.jobs.size());
    state.jobs.push_back(std::move(job));
  }
  std::vector<SubCloudSpec> specs = config.subclouds;
  std::sort(specs.begin(), specs.end(),
            [](const SubCloudSpec& a, const SubCloudSpec& b) { return a.id < b.id; });
  for (const auto& spec : specs) {
    SimSubCloud sc;
    sc.id = spec.id;
    sc.capacity = spec.capacity;
    state.subcloud_index.emplace(sc.id, state.subclouds.size());
    state.subclouds.push_back(std::move(sc));
  }
  return state;
}

namespace {

// Events at the same instant commit in class order: a job's earned milestone
// (checkpoint or completion) lands before an external failure, which lands
// before a fresh arrival. This is what keeps rollback loss strictly below the
// checkpoint interval even when a failure hits a checkpoint boundary.
enum class EvType { checkpoint, completion, failure, arrival };

struct Event {
  SimTime t = 0;
  int klass = 0;  // 0 milestones, 1 failures, 2 arrivals
  std::uint64_t seq = 0;
  EvType type = EvType::arrival;
  std::size_t target = 0;        // job index, or sub-cloud index for failures
  std::uint64_t generation = 0;  // job generation a milestone was scheduled under
  SimTime milestone = 0;         // progress a checkpoint milestone commits
};

struct EventAfter {
  bool operator()(const Event& x, const Event& y) const {
    if (x.t != y.t) return x.t > y.t;
    if (x.klass != y.klass) return x.klass > y.klass;
    return x.seq > y.seq;
  }
};

class Engine {
 public:
  explicit Engine(const SimConfig& config)
      : config_(config), state_(make_state(config)) {}

  SimTrace run();

 private:
  void record(SimTime t, const char* kind,
              std::vector<std::pair<std::string, std::string>> ids,
              std::vector<std::pair<std::string, SimTime>> values) {
    TraceEvent ev;
    ev.t = t;
    ev.kind = kind;
    ev.ids = std::move(ids);
    ev.values = std::move(values);
    trace_.events.push_back(std::move(ev));
  }

  void schedule_milestone(std::size_t job_idx) {
    SimJob& job = state_.jobs[job_idx];
    SimTime p = job.progress;
    SimTime next_cp =
        config_.checkpoint_interval * (p / config_.checkpoint_interval + 1);
    Event ev;
    ev.klass = 0;
    ev.seq = seq_++;
    ev.target = job_idx;
    ev.generation = job.generation;
    if (next_cp >= job.total_work) {
      // A checkpoint that would coincide with completion is skipped.
      ev.t = job.resumed_at + (job.total_work - p);
      ev.type = EvType::completion;
    } else {
      ev.t = job.resumed_at + (next_cp - p);
      ev.type = EvType::checkpoint;
      ev.milestone = next_cp;
    }
    queue_.push(ev);
  }

  void place(std::size_t job_idx, SimTime t) {
    SimJob& job = state_.jobs[job_idx];
    std::size_t best = npos;
    for (std::size_t i = 0; i < state_.subclouds.size(); ++i) {
      const SimSubCloud& sc = state_.subclouds[i];
      if (sc.capacity < job.demand) continue;
      if (best == npos) {
        best = i;
        continue;
      }
      const SimSubCloud& cur = state_.subclouds[best];
      double cand_load = static_cast<double>(sc.allocated) / sc.capacity;
      double best_load = static_cast<double>(cur.allocated) / cur.capacity;
      if (cand_load < best_load) {
        best = i;
      } else if (cand_load == best_load &&
                 sc.run_queue.size() < cur.run_queue.size()) {
        best = i;
      }
      // full ties keep the earlier sub-cloud, which is the smaller id
    }
    if (best == npos) {
      fail(Errc::internal, "validated job '" + job.id + "' fits no sub-cloud");
    }
    job.phase = JobPhase::queued;
    job.subcloud = state_.subclouds[best].id;
    enqueue_fifo(state_, state_.subclouds[best], job_idx);
    record(t, "arrival", {{"job", job.id}, {"subcloud", job.subcloud}}, {});
  }

  void settle(SimTime now) {
    std::set<std::string> migrated;  // at most one move per job per settlement
    bool changed = true;
    while (changed) {
      changed = false;
      start_pass(now, changed);
      migration_sweep(now, migrated, changed);
    }
  }

  void start_pass(SimTime now, bool& changed) {
    for (auto& sc : state_.subclouds) {
      // strict FIFO: a front job that does not fit blocks the whole queue
      while (!sc.run_queue.empty()) {
        std::size_t idx = sc.run_queue.front();
        SimJob& job = state_.jobs[idx];
        if (sc.allocated + job.demand > sc.capacity) break;
        sc.run_queue.erase(sc.run_queue.begin());
        allocate(sc, job.demand);
        job.phase = JobPhase::running;
        job.resumed_at = now;
        schedule_milestone(idx);
        record(now, "start", {{"job", job.id}, {"subcloud", sc.id}},
               {{"progress", job.progress}});
        changed = true;
      }
    }
  }

  void migration_sweep(SimTime now, std::set<std::string>& migrated,
                       bool& changed) {
    double threshold = config_.migration_policy_threshold;
    for (std::size_t si = 0; si < state_.subclouds.size(); ++si) {
      SimSubCloud& sc = state_.subclouds[si];
      double load = static_cast<double>(sc.allocated) / sc.capacity;
      if (!(load > threshold)) continue;
      std::vector<std::size_t> candidates;
      for (std::size_t i = 0; i < state_.jobs.size(); ++i) {
        const SimJob& j = state_.jobs[i];
        if (j.phase == JobPhase::running && j.subcloud == sc.id &&
            !migrated.count(j.id)) {
          candidates.push_back(i);
        }
      }
      // youngest first, so the job with the least seniority pays the rollback
      std::sort(candidates.begin(), candidates.end(),
                [&](std::size_t x, std::size_t y) {
                  return fifo_before(state_.jobs[y], state_.jobs[x]);
                });
      for (std::size_t ji : candidates) {
        const SimJob& job = state_.jobs[ji];
        std::size_t best = npos;
        for (std::size_t di = 0; di < state_.subclouds.size(); ++di) {
          if (di == si) continue;
          const SimSubCloud& dst = state_.subclouds[di];
          if (dst.allocated + job.demand > dst.capacity) continue;
          double post =
              static_cast<double>(dst.allocated + job.demand) / dst.capacity;
          if (post > threshold) continue;  // destination must stay within policy
          if (best == npos) {
            best = di;
            continue;
          }
          double best_load = static_cast<double>(state_.subclouds[best].allocated) /
                             state_.subclouds[best].capacity;
          double dst_load = static_cast<double>(dst.allocated) / dst.capacity;
          if (dst_load < best_load) best = di;
        }
        if (best == npos) continue;  // overload stands until capacity opens up
        std::string job_id = job.id;
        std::string from_id = sc.id;
        std::string to_id = state_.subclouds[best].id;
        migrate(state_, job_id, from_id, to_id);
        record(now, "migrate",
               {{"job", job_id}, {"from", from_id}, {"to", to_id}},
               {{"progress", state_.jobs[ji].progress}});
        migrated.insert(job_id);
        changed = true;
        break;  // one migration per overloaded source per sweep
      }
    }
  }

  void check_invariants() {
    std::map<std::string, int> running_sum;
    for (const auto& job : state_.jobs) {
      if (job.phase == JobPhase::running) running_sum[job.subcloud] += job.demand;
    }
    for (const auto& sc : state_.subclouds) {
      if (sc.allocated < 0 || sc.allocated > sc.capacity) {
        fail(Errc::internal, "capacity bound violated on sub-cloud '" + sc.id +
                                 "': allocated " + std::to_string(sc.allocated) +
                                 " of " + std::to_string(sc.capacity));
      }
      auto it = running_sum.find(sc.id);
      int expected = it == running_sum.end() ? 0 : it->second;
      if (sc.allocated != expected) {
        fail(Errc::internal,
             "allocation ledger out of sync on sub-cloud '" + sc.id + "'");
      }
    }
  }

  std::uint64_t event_budget() const {
    std::uint64_t budget = 10000;
    for (const auto& j : config_.jobs) {
      budget += 100 * static_cast<std::uint64_t>(
                          j.total_work / config_.checkpoint_interval + 5);
    }
    budget += 100 * static_cast<std::uint64_t>(config_.failures.size());
    return budget;
  }

  const SimConfig& config_;
  SimState state_;
  SimTrace trace_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t seq_ = 0;
};

SimTrace Engine::run() {
  for (const auto& f : config_.failures) {
    Event ev;
    ev.t = f.at;
    ev.klass = 1;
    ev.seq = seq_++;
    ev.type = EvType::failure;
    ev.target = state_.subcloud_index.at(f.subcloud);
    queue_.push(ev);
  }
  for (std::size_t i = 0; i < state_.jobs.size(); ++i) {
    Event ev;
    ev.t = state_.jobs[i].arrival_time;
    ev.klass = 2;
    ev.seq = seq_++;
    ev.type = EvType::arrival;
    ev.target = i;
    queue_.push(ev);
  }
  const std::uint64_t budget = event_budget();
  std::uint64_t processed = 0;
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    if (++processed > budget) {
      fail(Errc::internal,
           "event budget exhausted; the migration policy appears to cycle");
    }
    switch (ev.type) {
      case EvType::arrival: {
        place(ev.target, ev.t);
        settle(ev.t);
        break;
      }
      case EvType::failure: {
        const std::string& scid = state_.subclouds[ev.target].id;
        record(ev.t, "failure", {{"subcloud", scid}}, {});
        for (const auto& rec : inject_failure(state_, scid, ev.t)) {
          record(ev.t, "rollback", {{"job", rec.job}, {"subcloud", scid}},
                 {{"from_progress", rec.from_progress},
                  {"to_progress", rec.to_progress}});
        }
        settle(ev.t);
        break;
      }
      case EvType::checkpoint: {
        SimJob& job = state_.jobs[ev.target];
        if (job.generation != ev.generation || job.phase != JobPhase::running) {
          break;  // superseded by a rollback or migration
        }
        Checkpoint cp = take_checkpoint(state_, job.id, ev.t);
        job.progress = cp.progress_snapshot;
        job.resumed_at = ev.t + config_.checkpoint_overhead;
        record(ev.t, "checkpoint", {{"job", job.id}, {"subcloud", job.subcloud}},
               {{"progress", cp.progress_snapshot}});
        schedule_milestone(ev.target);
        settle(ev.t);
        break;
      }
      case EvType::completion: {
        SimJob& job = state_.jobs[ev.target];
        if (job.generation != ev.generation || job.phase != JobPhase::running) {
          break;
        }
        job.progress = job.total_work;
        job.phase = JobPhase::done;
        job.completion_time = ev.t;
        state_.subclouds[state_.subcloud_index.at(job.subcloud)].allocated -=
            job.demand;
        SimTime response = ev.t - job.arrival_time;
        record(ev.t, "complete", {{"job", job.id}, {"subcloud", job.subcloud}},
               {{"response_time_ms", response}});
        trace_.observations.push_back({job.consumer, job.service, response});
        settle(ev.t);
        break;
      }
    }
    check_invariants();
  }
  for (const auto& job : state_.jobs) {
    if (job.phase != JobPhase::done) {
      fail(Errc::internal, "job '" + job.id + "' never completed");
    }
    trace_.migration_counts[job.id] = job.migrations;
  }
  return std::move(trace_);
}

}  // namespace

SimTrace run(const SimConfig& config) {
  validate_config(config);
  Engine engine(config);
  return engine.run();
}

std::vector<ObservationSet> observations_from_trace(const SimTrace& trace) {
  std::map<std::string, std::map<ServiceId, std::pair<double, int>>> acc;
  for (const auto& row : trace.observations) {
    auto& slot = acc[row.consumer][row.service];
    slot.first += static_cast<double>(row.response_time_ms);
    slot.second += 1;
  }
  std::vector<ObservationSet> out;
  for (const auto& [consumer, samples] : acc) {
    ObservationSet obs;
    obs.consumer = consumer;
    for (const auto& [service, slot] : samples) {
      obs.samples[service] = slot.first / slot.second;
    }
    out.push_back(std::move(obs));
  }
  return out;
}

}  // namespace csrank
