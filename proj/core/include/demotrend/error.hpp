#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace demotrend {

enum class ErrorCode {
  InvalidArgument,  // precondition on an argument violated
  OutOfRange,       // month/age/range outside the data
  Degenerate,       // zero variance or perfect fit; statistic undefined
  RankDeficient,    // collinear regressors
  Singular,         // singular covariance or moment matrix
  Parse,            // malformed input file
  Io,               // filesystem failure
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure in the library surfaces as this exception. The code lets
/// callers and tests branch on the failure class without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace demotrend
