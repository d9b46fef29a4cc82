#include "report.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>

#include "geoconvex/expr.hpp"
#include "problem_file.hpp"

namespace geoconvex::cli {
namespace {

bool holds(double measured, double tolerance, const std::string& relation) {
  if (relation == ">=") return measured >= tolerance;
  if (relation == "==") return measured == tolerance;
  if (relation == ">") return measured > tolerance;
  return measured <= tolerance;
}

// JSON has no infinities or NaN; they are written as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ProjectionNotCertified:
    case ErrorKind::SupportNotCertified:
    case ErrorKind::NNLSStalled:
    case ErrorKind::SamplingExhausted:
    case ErrorKind::NumericalBreakdown:
      return kExitInconclusive;
    default:
      return kExitInput;
  }
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr);
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

Report::Report(std::string command, std::string_view input, std::uint64_t seed)
    : command_(std::move(command)), digest_("sha256:" + sha256_hex(input)), seed_(seed) {}

void Report::check(std::string name, double measured, double tolerance, std::string relation) {
  CheckRecord r;
  r.name = std::move(name);
  r.measured = measured;
  r.tolerance = tolerance;
  r.status = holds(measured, tolerance, relation) ? CheckStatus::pass : CheckStatus::fail;
  r.relation = std::move(relation);
  checks_.push_back(std::move(r));
}

void Report::check(const CheckRecord& record) { checks_.push_back(record); }

void Report::inconclusive(std::string name, double measured, double tolerance,
                          std::string relation) {
  CheckRecord r;
  r.name = std::move(name);
  r.measured = measured;
  r.tolerance = tolerance;
  r.relation = std::move(relation);
  r.status = CheckStatus::inconclusive;
  checks_.push_back(std::move(r));
}

void Report::set_point(const std::string& key, const Point& p) { set_vector(key, p.coords()); }

void Report::set_vector(const std::string& key, const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  fields_[key] = std::move(arr);
}

void Report::error(const Error& e) {
  error(e.kind(), e.what(), exit_code_for(e.kind()));
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    error_["error_offset"] = pe->offset();
    error_["error_expected"] = pe->expected();
    error_["error_excerpt"] = pe->excerpt();
  }
  if (const auto* ee = dynamic_cast<const ExpressionError*>(&e)) {
    error_["error_line"] = ee->line();
    error_["error_key"] = ee->key();
  }
  if (const auto* pe = dynamic_cast<const ProblemError*>(&e)) {
    error_["error_line"] = pe->line();
  }
  if (const auto* de = dynamic_cast<const EvalDomainError*>(&e)) {
    error_["error_offset"] = de->offset();
  }
}

void Report::error(ErrorKind kind, const std::string& message, int exit_code) {
  error_ = Json::object();
  error_["error"] = std::string(to_string(kind));
  error_["error_message"] = message;
  error_exit_ = exit_code;
}

int Report::exit_code() const noexcept {
  if (error_exit_) return *error_exit_;
  bool inconclusive = false;
  for (const CheckRecord& r : checks_) {
    if (r.status == CheckStatus::fail) return kExitFail;
    if (r.status == CheckStatus::inconclusive) inconclusive = true;
  }
  return inconclusive ? kExitInconclusive : kExitPass;
}

Json Report::finish(double wall_time_s) const {
  static constexpr const char* kStatus[] = {"pass", "fail", "input_error", "inconclusive"};
  const int code = exit_code();
  Json out = Json::object();
  out["command"] = command_;
  out["input_digest"] = digest_;
  out["seed"] = seed_;
  out["status"] = kStatus[code];
  out["exit_code"] = code;
  for (const auto& [k, v] : error_.items()) out[k] = v;
  for (const auto& [k, v] : fields_.items()) out[k] = v;
  Json checks = Json::array();
  for (const CheckRecord& r : checks_) {
    Json c = Json::object();
    if (r.criterion > 0) c["criterion"] = r.criterion;
    c["name"] = r.name;
    c["status"] = std::string(to_string(r.status));
    c["measured"] = number(r.measured);
    c["relation"] = r.relation;
    c["tolerance"] = number(r.tolerance);
    if (!r.note.empty()) c["note"] = r.note;
    checks.push_back(std::move(c));
  }
  out["checks"] = std::move(checks);
  out["wall_time_s"] = wall_time_s;
  return out;
}

Json strip_wall_time(Json report) {
  report.erase("wall_time_s");
  return report;
}

}  // namespace geoconvex::cli
