#include "sobext/errors.hpp"

namespace sobext {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDomain: return "InvalidDomain";
    case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::ConstructionError: return "ConstructionError";
    case ErrorKind::CollarPoint: return "CollarPoint";
    case ErrorKind::PreconditionNotMet: return "PreconditionNotMet";
    case ErrorKind::UnsupportedExponent: return "UnsupportedExponent";
    case ErrorKind::Unreachable: return "Unreachable";
    case ErrorKind::DegenerateCase: return "DegenerateCase";
    case ErrorKind::Format: return "Format";
    case ErrorKind::Usage: return "Usage";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace sobext
