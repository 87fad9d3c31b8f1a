#include "csrank/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "csrank/error.hpp"
#include "csrank/rng.hpp"
#include "csrank/version.hpp"

namespace csrank {

namespace {

constexpr const char* kCsvHeader = "consumer_id,service_id,response_time_ms";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::io_error, "cannot open '" + path + "' for reading");
  }
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(Errc::io_error, "cannot open '" + path + "' for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    fail(Errc::io_error, "write to '" + path + "' failed");
  }
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string quoted(const std::string& s) { return "\"" + json_escape(s) + "\""; }

// Inverse normal CDF by bisection over std::erf. Runs a handful of times per
// generation call, so the iteration count is a non-issue.
double probit(double q) {
  double lo = -8.0;
  double hi = 8.0;
  for (int i = 0; i < 120; ++i) {
    double mid = 0.5 * (lo + hi);
    double cdf = 0.5 * (1.0 + std::erf(mid / std::sqrt(2.0)));
    if (cdf < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

int count_lines_before(const std::string& content, std::size_t pos) {
  return static_cast<int>(std::count(content.begin(), content.begin() + pos, '\n'));
}

void check_csv_safe_id(const std::string& id) {
  if (id.find_first_of(",\n\r") != std::string::npos) {
    fail(Errc::invalid_value, "id '" + id + "' contains a CSV delimiter");
  }
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v) || std::abs(v) >= 1e15) {
    fail(Errc::internal, "number out of serializable range");
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  std::size_t last = s.find_last_not_of('0');
  if (s[last] == '.') --last;
  s.erase(last + 1);
  if (s == "-0") s = "0";
  return s;
}

Dataset load_observations(const std::string& path) {
  std::string content = read_file(path);
  std::size_t cr = content.find('\r');
  if (cr != std::string::npos) {
    fail(Errc::parse_error, "line " +
                                std::to_string(count_lines_before(content, cr) + 1) +
                                ": carriage return found; LF line endings required");
  }
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t nl = content.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(content.substr(start));
      break;
    }
    lines.push_back(content.substr(start, nl - start));
    start = nl + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) {
    fail(Errc::parse_error, "line 1: missing header");
  }
  if (lines[0] != kCsvHeader) {
    fail(Errc::parse_error,
         std::string("line 1: header must be exactly '") + kCsvHeader + "'");
  }
  std::map<ConsumerId, ObservationSet> consumers;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    std::string where = "line " + std::to_string(i + 1) + ": ";
    std::vector<std::string> fields;
    std::size_t from = 0;
    while (true) {
      std::size_t comma = line.find(',', from);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(from));
        break;
      }
      fields.push_back(line.substr(from, comma - from));
      from = comma + 1;
    }
    if (fields.size() != 3) {
      fail(Errc::parse_error, where + "expected 3 fields, found " +
                                  std::to_string(fields.size()));
    }
    const std::string& consumer = fields[0];
    const std::string& service = fields[1];
    if (consumer.empty()) fail(Errc::parse_error, where + "empty consumer_id");
    if (service.empty()) fail(Errc::parse_error, where + "empty service_id");
    double rt = 0.0;
    const char* first = fields[2].data();
    const char* last = first + fields[2].size();
    auto [ptr, ec] = std::from_chars(first, last, rt);
    if (ec != std::errc() || ptr != last) {
      fail(Errc::parse_error, where + "response_time_ms is not a number");
    }
    if (!std::isfinite(rt) || rt <= 0.0) {
      fail(Errc::invalid_value, where + "response_time_ms must be positive");
    }
    ObservationSet& obs = consumers[consumer];
    obs.consumer = consumer;
    if (obs.samples.count(service)) {
      fail(Errc::duplicate_observation,
           where + "duplicate observation for consumer '" + consumer +
               "', service '" + service + "'");
    }
    obs.samples[service] = rt;
  }
  Dataset ds;
  std::set<ServiceId> services;
  for (auto& [id, obs] : consumers) {
    (void)id;
    for (const auto& [s, rt] : obs.samples) {
      (void)rt;
      services.insert(s);
    }
    ds.consumers.push_back(std::move(obs));
  }
  ds.services.assign(services.begin(), services.end());
  return ds;
}

void save_observations(const std::vector<ObservationSet>& consumers,
                       const std::string& path) {
  std::vector<const ObservationSet*> order;
  order.reserve(consumers.size());
  for (const auto& obs : consumers) order.push_back(&obs);
  std::sort(order.begin(), order.end(),
            [](const ObservationSet* a, const ObservationSet* b) {
              return a->consumer < b->consumer;
            });
  std::string out = std::string(kCsvHeader) + "\n";
  for (const ObservationSet* obs : order) {
    check_csv_safe_id(obs->consumer);
    for (const auto& [service, rt] : obs->samples) {
      check_csv_safe_id(service);
      out += obs->consumer;
      out += ',';
      out += service;
      out += ',';
      out += format_number(rt);
      out += '\n';
    }
  }
  write_file(path, out);
}

void save_observations(const Dataset& ds, const std::string& path) {
  save_observations(ds.consumers, path);
}

void save_ranking(const RankedList& r, const PriorityVector& pv,
                  const std::string& path) {
  if (r.ordering.size() != pv.size()) {
    fail(Errc::invalid_parameter,
         "ranking and priority values cover different services");
  }
  for (const auto& s : r.ordering) {
    if (!pv.count(s)) {
      fail(Errc::invalid_parameter,
           "service '" + s + "' is ranked but has no priority value");
    }
  }
  std::string out = "{\n";
  out += "  \"generated_by\": " + quoted(kVersion) + ",\n";
  out += "  \"ordering\": [";
  for (std::size_t i = 0; i < r.ordering.size(); ++i) {
    if (i) out += ", ";
    out += quoted(r.ordering[i]);
  }
  out += "],\n";
  out += "  \"priority_values\": {";
  bool first = true;
  for (const auto& [s, v] : pv) {  // map order, so keys come out sorted
    if (!first) out += ", ";
    first = false;
    out += quoted(s) + ": " + format_number(v);
  }
  out += "}\n}\n";
  write_file(path, out);
}

RankedList load_ranking(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, "'" + path + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("ordering") ||
      !doc["ordering"].is_array()) {
    fail(Errc::parse_error, "'" + path + "': expected an ordering array");
  }
  std::vector<ServiceId> ordering;
  for (const auto& item : doc["ordering"]) {
    if (!item.is_string()) {
      fail(Errc::parse_error, "'" + path + "': ordering must hold strings");
    }
    ordering.push_back(item.get<std::string>());
  }
  return make_ranked_list(std::move(ordering));
}

void save_ground_truth(const RankedList& r, const std::string& path) {
  std::string out = "{\n";
  out += "  \"generated_by\": " + quoted(kVersion) + ",\n";
  out += "  \"ordering\": [";
  for (std::size_t i = 0; i < r.ordering.size(); ++i) {
    if (i) out += ", ";
    out += quoted(r.ordering[i]);
  }
  out += "]\n}\n";
  write_file(path, out);
}

namespace {

std::string padded_id(const char* stem, int i, int total) {
  size_t width = 1;
  for (int t = total; t >= 10; t /= 10) ++width;
  std::string digits = std::to_string(i);
  std::string out = stem;
  out += '_';
  if (digits.size() < width) out.append(width - digits.size(), '0');
  out += digits;
  return out;
}

}  // namespace

Dataset generate_synthetic(std::uint64_t seed, int n_services, int n_consumers,
                           double noise, double observe_prob) {
  if (n_services < 2) {
    fail(Errc::invalid_parameter, "n_services must be at least 2");
  }
  if (n_consumers < 1) {
    fail(Errc::invalid_parameter, "n_consumers must be at least 1");
  }
  if (!(noise >= 0.0 && noise <= 1.0)) {
    fail(Errc::invalid_parameter, "noise must lie in [0, 1]");
  }
  if (!(observe_prob > 0.0 && observe_prob <= 1.0)) {
    fail(Errc::invalid_parameter, "observe_prob must lie in (0, 1]");
  }
  Dataset ds;
  for (int i = 1; i <= n_services; ++i) {
    ds.services.push_back(padded_id("svc", i, n_services));
  }
  Rng rng(seed);
  std::vector<ServiceId> truth = ds.services;
  for (int i = n_services - 1; i > 0; --i) {
    std::size_t j = rng.below(static_cast<std::uint64_t>(i) + 1);
    std::swap(truth[i], truth[j]);
  }
  // Adjacent ground-truth positions sit a constant factor apart in latency,
  // so one sigma serves every adjacent pair equally.
  constexpr double kStep = 1.25;
  std::map<ServiceId, double> base;
  for (int p = 0; p < n_services; ++p) {
    base[truth[p]] = 100.0 * std::pow(kStep, p);
  }
  double sigma = 0.0;
  if (noise > 0.0) {
    // P(adjacent pair swaps) = 1 - Phi(log kStep / (sigma * sqrt 2)) = noise.
    // Half a coin flip is the model's ceiling, hence the clamp just below it.
    double effective = std::min(noise, 0.499);
    sigma = std::log(kStep) / (std::sqrt(2.0) * probit(1.0 - effective));
  }
  for (int c = 1; c <= n_consumers; ++c) {
    ObservationSet obs;
    obs.consumer = padded_id("cons", c, n_consumers);
    for (const auto& s : ds.services) {
      if (rng.uniform01() >= observe_prob) continue;
      double v = base[s];
      if (sigma > 0.0) v *= std::exp(sigma * rng.normal());
      if (v > 1e12) v = 1e12;
      v = std::round(v * 1e6) / 1e6;  // lock to the serialized precision
      if (v < 1e-6) v = 1e-6;
      obs.samples[s] = v;
    }
    // a consumer that saw nothing cannot round-trip through CSV, so drop it
    if (!obs.samples.empty()) ds.consumers.push_back(std::move(obs));
  }
  ds.ground_truth = make_ranked_list(std::move(truth));
  return ds;
}

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
  fail(Errc::parse_error, "config '" + path + "': " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) {
      config_fail(path, where + ": unknown key '" + key + "'");
    }
  }
}

std::string need_string(const json& obj, const char* key,
                        const std::string& path, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    config_fail(path, where + ": '" + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

std::int64_t need_int(const json& obj, const char* key, const std::string& path,
                      const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    config_fail(path, where + ": '" + key + "' must be an integer");
  }
  return obj[key].get<std::int64_t>();
}

std::int64_t opt_int(const json& obj, const char* key, std::int64_t fallback,
                     const std::string& path, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) {
    config_fail(path, where + ": '" + key + "' must be an integer");
  }
  return obj[key].get<std::int64_t>();
}

}  // namespace

SimConfig load_sim_config(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    config_fail(path, e.what());
  }
  if (!doc.is_object()) config_fail(path, "top level must be an object");
  check_keys(doc,
             {"seed", "checkpoint_interval", "checkpoint_overhead",
              "migration_policy_threshold", "subclouds", "jobs", "failures"},
             path, "top level");
  SimConfig config;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      config_fail(path, "'seed' must be an integer");
    }
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  config.checkpoint_interval = need_int(doc, "checkpoint_interval", path, "top level");
  config.checkpoint_overhead = opt_int(doc, "checkpoint_overhead", 0, path, "top level");
  if (doc.contains("migration_policy_threshold")) {
    if (!doc["migration_policy_threshold"].is_number()) {
      config_fail(path, "'migration_policy_threshold' must be a number");
    }
    config.migration_policy_threshold =
        doc["migration_policy_threshold"].get<double>();
  }
  if (!doc.contains("subclouds") || !doc["subclouds"].is_array()) {
    config_fail(path, "'subclouds' must be an array");
  }
  for (const auto& item : doc["subclouds"]) {
    if (!item.is_object()) config_fail(path, "each sub-cloud must be an object");
    check_keys(item, {"id", "capacity"}, path, "subclouds");
    SubCloudSpec sc;
    sc.id = need_string(item, "id", path, "subclouds");
    sc.capacity = static_cast<int>(need_int(item, "capacity", path, "subclouds"));
    config.subclouds.push_back(std::move(sc));
  }
  if (!doc.contains("jobs") || !doc["jobs"].is_array()) {
    config_fail(path, "'jobs' must be an array");
  }
  for (const auto& item : doc["jobs"]) {
    if (!item.is_object()) config_fail(path, "each job must be an object");
    check_keys(item,
               {"id", "consumer", "service", "arrival_time", "total_work",
                "demand"},
               path, "jobs");
    JobSpec j;
    j.id = need_string(item, "id", path, "jobs");
    j.consumer = need_string(item, "consumer", path, "jobs");
    j.service = need_string(item, "service", path, "jobs");
    j.arrival_time = opt_int(item, "arrival_time", 0, path, "jobs");
    j.total_work = need_int(item, "total_work", path, "jobs");
    j.demand = static_cast<int>(need_int(item, "demand", path, "jobs"));
    config.jobs.push_back(std::move(j));
  }
  if (doc.contains("failures")) {
    if (!doc["failures"].is_array()) config_fail(path, "'failures' must be an array");
    for (const auto& item : doc["failures"]) {
      if (!item.is_object()) config_fail(path, "each failure must be an object");
      check_keys(item, {"subcloud", "time"}, path, "failures");
      FailureSpec f;
      f.subcloud = need_string(item, "subcloud", path, "failures");
      f.at = need_int(item, "time", path, "failures");
      config.failures.push_back(std::move(f));
    }
  }
  return config;
}

void save_trace(const SimTrace& trace, const std::string& path) {
  std::string out = "{\n  \"events\": [";
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const TraceEvent& ev = trace.events[i];
    out += i ? ",\n    " : "\n    ";
    // detail keys merge sorted so the layout never depends on event kind
    std::map<std::string, std::string> detail;
    for (const auto& [k, v] : ev.ids) detail[k] = quoted(v);
    for (const auto& [k, v] : ev.values) detail[k] = std::to_string(v);
    out += "{\"detail\": {";
    bool first = true;
    for (const auto& [k, v] : detail) {
      if (!first) out += ", ";
      first = false;
      out += quoted(k) + ": " + v;
    }
    out += "}, \"kind\": " + quoted(ev.kind) +
           ", \"t\": " + std::to_string(ev.t) + "}";
  }
  out += trace.events.empty() ? "],\n" : "\n  ],\n";
  out += "  \"migration_counts\": {";
  bool first = true;
  for (const auto& [job, count] : trace.migration_counts) {
    if (!first) out += ", ";
    first = false;
    out += quoted(job) + ": " + std::to_string(count);
  }
  out += "},\n  \"observations\": [";
  for (std::size_t i = 0; i < trace.observations.size(); ++i) {
    const ObservationRow& row = trace.observations[i];
    out += i ? ",\n    " : "\n    ";
    out += "{\"consumer\": " + quoted(row.consumer) +
           ", \"response_time_ms\": " + std::to_string(row.response_time_ms) +
           ", \"service\": " + quoted(row.service) + "}";
  }
  out += trace.observations.empty() ? "]\n}\n" : "\n  ]\n}\n";
  write_file(path, out);
}

void save_trace_observations(const SimTrace& trace, const std::string& path) {
  save_observations(observations_from_trace(trace), path);
}

}  // namespace csrank
