#include "ridecomfort/error.hpp"

namespace ridecomfort {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::io: return "IoError";
    case ErrorCode::malformed_row: return "MalformedRow";
    case ErrorCode::non_monotonic_time: return "NonMonotonicTime";
    case ErrorCode::empty_log: return "EmptyLog";
    case ErrorCode::gap_too_large: return "GapTooLarge";
    case ErrorCode::out_of_range: return "OutOfRange";
    case ErrorCode::malformed_manifest: return "MalformedManifest";
    case ErrorCode::unstable_design: return "UnstableDesign";
    case ErrorCode::rate_mismatch: return "RateMismatch";
    case ErrorCode::too_few_samples: return "TooFewSamples";
    case ErrorCode::zero_distance: return "ZeroDistance";
    case ErrorCode::trace_too_short: return "TraceTooShort";
    case ErrorCode::segment_too_long: return "SegmentTooLong";
    case ErrorCode::empty_sample_set: return "EmptySampleSet";
    case ErrorCode::degenerate_bandwidth: return "DegenerateBandwidth";
    case ErrorCode::no_matched_situations: return "NoMatchedSituations";
    case ErrorCode::nyquist_violation: return "NyquistViolation";
  }
  return "Unknown";
}

}  // namespace ridecomfort
