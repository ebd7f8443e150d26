#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace treegibbs::cli {

struct GlobalOptions {
  std::string config;                 // empty: built-in default
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::string out;                    // empty: primary artifact on stdout
  std::string format = "json";        // json | csv
};

struct ThresholdOptions {
  std::vector<int> d{2, 3, 6};
  std::vector<int> n{1, 2, 10};
  std::string model = "both";  // sos | log | both
};

struct Artifact {
  std::string name;
  std::string content;
};

// Files to write under --out; files[primary] goes to stdout without --out.
struct CommandResult {
  int exit_code = 0;
  std::vector<Artifact> files;
  std::size_t primary = 0;
};

enum ExitCode : int {
  kOk = 0,
  kBoundFailure = 1,
  kConfigError = 2,
  kThresholdExceeded = 3,
  kBracketOpen = 4,
  kIterationLimit = 5,
  kPostcondition = 6,
  kTruncation = 7,
};

ModelConfig resolve_config(const GlobalOptions& g, bool fuzzy_default);

CommandResult cmd_thresholds(const ThresholdOptions& t, const GlobalOptions& g);
CommandResult cmd_solve(const GlobalOptions& g);
CommandResult cmd_verify(const GlobalOptions& g);
CommandResult cmd_sample(const GlobalOptions& g);
CommandResult cmd_ggm(const GlobalOptions& g);

/// Runs fn, mapping library errors to exit codes and an error.json artifact.
template <class Fn>
CommandResult run_guarded(Fn&& fn);

CommandResult error_result(const std::exception& e);

/// Writes the artifacts (or the primary one to stdout); returns the exit code.
int emit(const CommandResult& r, const GlobalOptions& g);

template <class Fn>
CommandResult run_guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return error_result(e);
  }
}

}  // namespace treegibbs::cli
