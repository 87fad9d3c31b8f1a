#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace csrank {

// Stable error discriminants. The C API maps these onto csr_status codes
// one for one, so entries must not be reordered or removed.
enum class Errc {
  ok = 0,
  empty_universe,
  insufficient_overlap,
  no_services,
  unschedulable_job,
  not_running,
  unknown_subcloud,
  capacity_exceeded,
  parse_error,
  duplicate_observation,
  invalid_value,
  io_error,
  invalid_parameter,
  unknown_consumer,
  dataset_too_small,
  internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace csrank
