#pragma once

#include <stdexcept>
#include <string>

namespace aoisim {

// Numeric values are shared with aoisim_status in the C header.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kParameterization = 2,
  kEmptyTrace = 3,
  kUnsupportedPolicy = 4,
  kConfig = 5,
  kScope = 6,
  kIo = 7,
  kUnknownFigure = 8,
  kInternal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aoisim
