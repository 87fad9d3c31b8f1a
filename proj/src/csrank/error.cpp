#include "csrank/error.hpp"

namespace csrank {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ok: return "ok";
    case Errc::empty_universe: return "EmptyUniverse";
    case Errc::insufficient_overlap: return "InsufficientOverlap";
    case Errc::no_services: return "NoServices";
    case Errc::unschedulable_job: return "UnschedulableJob";
    case Errc::not_running: return "NotRunning";
    case Errc::unknown_subcloud: return "UnknownSubCloud";
    case Errc::capacity_exceeded: return "CapacityExceeded";
    case Errc::parse_error: return "ParseError";
    case Errc::duplicate_observation: return "DuplicateObservation";
    case Errc::invalid_value: return "InvalidValue";
    case Errc::io_error: return "IoError";
    case Errc::invalid_parameter: return "InvalidParameter";
    case Errc::unknown_consumer: return "UnknownConsumer";
    case Errc::dataset_too_small: return "DatasetTooSmall";
    case Errc::internal: return "InternalError";
  }
  return "InternalError";
}

}  // namespace csrank
