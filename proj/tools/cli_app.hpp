#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace excires::cli {

// 1/(2 pi c) in picoseconds: one internal time unit (reciprocal cm^-1,
// hbar = 1) expressed in ps.  All user-facing times cross this boundary.
inline constexpr double kPicosecondsPerUnit = 5.3088374587;

// Fixed documented seed so seedless runs reproduce byte-for-byte.  The
// EXCIRES_SEED environment variable overrides this default (and is echoed
// into output metadata); an explicit --seed flag overrides both.
inline constexpr std::uint64_t kDefaultSeed = 20120717;
inline constexpr const char* kSeedEnvironmentVariable = "EXCIRES_SEED";

// Dispatches one invocation (argv without the program name) and returns the
// process exit code: 0 success, 1 validation/parameter/I-O error, 2 numerical
// non-convergence (achieved tolerances printed), 64 unknown subcommand.
int run_command(const std::vector<std::string>& args);

}  // namespace excires::cli
