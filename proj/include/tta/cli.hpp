#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tta {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitArgs = 2,
  kExitTopology = 3,
  kExitNaN = 4,
  kExitSignature = 5,
  kExitOracleCap = 6,
};

/// Runs one `tta` invocation. `args` excludes the program name. CSV without
/// an output path goes to `out`; everything human-readable goes to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace tta
