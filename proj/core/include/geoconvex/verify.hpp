#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace geoconvex {

enum class CheckStatus { pass, fail, inconclusive };

std::string_view to_string(CheckStatus s) noexcept;

/// One measured property. `relation` is "<=" or ">=": the check passes
/// when `measured relation tolerance` holds.
struct CheckRecord {
  int criterion = 0;
  std::string name;
  CheckStatus status = CheckStatus::fail;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";
  std::string note;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  /// Called as each record is produced (progress logging).
  std::function<void(const CheckRecord&)> on_record;
};

/// Short title of each acceptance criterion, indexed 1..11 (0 is unused).
const std::vector<std::string>& criterion_titles();

/// Property suite for criteria 1-10 on the built-in corpus. Criterion 11
/// concerns the command-line front end and is checked there.
std::vector<CheckRecord> run_verification(const VerifyOptions& options = {});

/// Summary status of the records with the given criterion number
/// (fail dominates inconclusive dominates pass; no records is inconclusive).
CheckStatus criterion_status(const std::vector<CheckRecord>& records, int criterion);

}  // namespace geoconvex
