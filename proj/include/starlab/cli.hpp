#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "starlab/harness.hpp"

namespace starlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Names the environment variable holding the default output directory.
inline constexpr std::string_view kResultsDirEnv = "STARLAB_RESULTS_DIR";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Invocation {
  std::string subcommand;
  /// Flag values by long name without dashes. Config-file values are merged
  /// in for flags absent from the command line. Switches map to "true".
  std::map<std::string, std::string> flags;
  std::optional<std::string> output;
  /// Set when --help was requested; holds the rendered text.
  std::optional<std::string> help;

  bool has(std::string_view flag) const { return flags.contains(std::string(flag)); }
};

/// `args` excludes the program name. Throws UsageError.
Invocation parse(const std::vector<std::string>& args);

/// Harness configuration of a sweep, null-phase, agreement, recovery, rem or
/// enumerate invocation. Throws UsageError.
harness::RunConfig to_run_config(const Invocation& inv);

/// Runs one invocation, writing data to `out` and diagnostics to `err`.
int dispatch(const Invocation& inv, std::ostream& out, std::ostream& err);

/// parse + dispatch with the exit-code contract: 0 ok, 1 runtime failure,
/// 2 usage. Errors are reported as a single "error: ..." line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Curve of `metric` (estimate +- 2 stderr) against the grid value, with the
/// analytic target 1 - Phi(gamma / sqrt 2) drawn as a line.
std::string render_svg(const harness::RunRecord& record, std::string_view metric);

}  // namespace starlab::cli
