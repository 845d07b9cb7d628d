#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ridecomfort {

enum class ErrorCode {
  invalid_argument,
  io,
  malformed_row,
  non_monotonic_time,
  empty_log,
  gap_too_large,
  out_of_range,
  malformed_manifest,
  unstable_design,
  rate_mismatch,
  too_few_samples,
  zero_distance,
  trace_too_short,
  segment_too_long,
  empty_sample_set,
  degenerate_bandwidth,
  no_matched_situations,
  nyquist_violation,
};

std::string_view to_string(ErrorCode code);

// Every domain failure in the library is reported as an Error carrying a
// machine-checkable code. The message names the offending row/section/path.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ridecomfort
