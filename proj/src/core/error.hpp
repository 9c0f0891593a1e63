#pragma once

#include <stdexcept>
#include <string>

namespace fda {

enum class ErrorCode {
  kInvalidArgument = 1,  // precondition / validation failure
  kDimensionMismatch,
  kEmptyReduction,
  kIo,
  kInternal,
};

// All recoverable failures in the core surface as fda::Error; the C API maps
// the code one-to-one onto fda_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Error invalid_argument(const std::string& what) {
  return Error(ErrorCode::kInvalidArgument, what);
}
inline Error dimension_mismatch(const std::string& what) {
  return Error(ErrorCode::kDimensionMismatch, what);
}
inline Error io_error(const std::string& what) { return Error(ErrorCode::kIo, what); }

}  // namespace fda
