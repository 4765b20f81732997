#pragma once

#include <stdexcept>
#include <string>

namespace qcs {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Validation,
  Io,
  UnknownNode,
  Capacity,
  Domain,
  Contract,
};

const char* error_code_name(ErrorCode code);

/// All library failures are reported through this exception; the C API maps
/// the code onto qcs_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qcs
