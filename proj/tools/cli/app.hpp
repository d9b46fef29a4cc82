#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "report.hpp"

namespace geoconvex::cli {

struct Invocation {
  std::string command;               // project | separate | support | cone | kkt | solve | verify
  std::optional<std::string> file;   // problem file path (optional for verify)
  std::optional<std::string> point;  // "x,y,z"
  std::optional<std::uint64_t> seed;
  std::optional<int> probes;
  bool use_start = false;
};

struct Outcome {
  int exit_code = kExitInput;
  Json report;
};

/// Reads the problem file and dispatches. Seed precedence: --seed, then
/// GEOCONVEX_SEED, then the file's `seed`, then 0.
Outcome run(const Invocation& inv, std::ostream& log);

/// Same as run with the problem text supplied directly and no environment
/// lookup; `label` names the input in the log.
Outcome run_text(const Invocation& inv, std::string_view text, std::string_view label,
                 std::ostream& log);

/// Built-in problem files, shipped as samples/<name>.gcp.
std::string_view sample_problem(std::string_view name);

/// Criterion 11 checks that can run in-process: the exit-code contracts on
/// the built-in samples and report determinism of every file command.
std::vector<CheckRecord> contract_checks(std::uint64_t seed, std::ostream& log);

}  // namespace geoconvex::cli
