#include "qcs/error.hpp"

namespace qcs {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Io: return "io";
    case ErrorCode::UnknownNode: return "unknown_node";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Contract: return "contract";
  }
  return "unknown";
}

}  // namespace qcs
