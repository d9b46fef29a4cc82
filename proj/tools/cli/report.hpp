#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geoconvex/error.hpp"
#include "geoconvex/manifold.hpp"
#include "geoconvex/verify.hpp"

namespace geoconvex::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kExitPass = 0,
  kExitFail = 1,
  kExitInput = 2,
  kExitInconclusive = 3,
};

/// Numeric non-certification kinds map to 3, every other kind to 2.
int exit_code_for(ErrorKind kind) noexcept;

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Flat JSON report: scalar or numeric-array fields plus one array of check
/// records. Keys appear in insertion order so equal runs dump equal bytes.
class Report {
 public:
  Report(std::string command, std::string_view input, std::uint64_t seed);

  /// Check passing when `measured relation tolerance` holds; relation is one
  /// of "<=", ">=", "==", ">".
  void check(std::string name, double measured, double tolerance, std::string relation = "<=");
  void check(const CheckRecord& record);
  void inconclusive(std::string name, double measured, double tolerance, std::string relation = "<=");

  template <class T>
  void set(const std::string& key, T&& value) {
    fields_[key] = std::forward<T>(value);
  }
  void set_point(const std::string& key, const Point& p);
  void set_vector(const std::string& key, const Vector& v);

  /// Records the error object; the exit code follows the error kind.
  void error(const Error& e);
  void error(ErrorKind kind, const std::string& message, int exit_code);

  const std::vector<CheckRecord>& checks() const noexcept { return checks_; }
  int exit_code() const noexcept;

  /// Final document; `wall_time_s` is the only nondeterministic field.
  Json finish(double wall_time_s) const;

 private:
  std::string command_;
  std::string digest_;
  std::uint64_t seed_;
  Json fields_ = Json::object();
  std::vector<CheckRecord> checks_;
  std::optional<int> error_exit_;
  Json error_ = Json::object();
};

/// The JSON document without `wall_time_s`, for determinism comparisons.
Json strip_wall_time(Json report);

}  // namespace geoconvex::cli
