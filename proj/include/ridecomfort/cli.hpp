#pragma once

#include <ostream>

namespace ridecomfort {

/// Name of the environment variable that overrides the default output directory.
inline constexpr const char* kOutDirEnv = "RIDECOMFORT_OUT_DIR";

/// Runs one `ridecomfort` invocation. Returns 0 on success, 1 on a domain or
/// input error (diagnostic on `err`), 2 on a usage error. `--help` returns 0.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ridecomfort
