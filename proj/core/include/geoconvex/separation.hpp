#pragma once

#include <cstdint>
#include <optional>

#include "geoconvex/cones.hpp"
#include "geoconvex/region.hpp"

namespace geoconvex {

/// H(p, q, alpha) = {a : <u, log_p a> = alpha} with u = log_p q.
class QuasiHyperplane {
 public:
  /// Throws InvalidQuasiHyperplane for a zero direction or a direction not
  /// tangent at `base`.
  static QuasiHyperplane make(const TangentVector& direction, double offset,
                              std::optional<Point> witness = std::nullopt);

  const Point& base() const noexcept { return direction_.base(); }
  const TangentVector& direction() const noexcept { return direction_; }
  double offset() const noexcept { return offset_; }
  const std::optional<Point>& witness() const noexcept { return witness_; }

  /// <u, log_base a> - alpha.
  double evaluate(const Point& a) const;

 private:
  QuasiHyperplane(TangentVector direction, double offset, std::optional<Point> witness)
      : direction_(std::move(direction)), offset_(offset), witness_(std::move(witness)) {}

  TangentVector direction_;
  double offset_;
  std::optional<Point> witness_;
};

struct SeparationCertificate {
  QuasiHyperplane plane;
  ProjectionResult projection;
  double point_value = 0.0;  // <u, log_p y>
  double set_sup = 0.0;      // max over probes z of <u, log_p z>
  int probes_used = 0;
  double margin = 0.0;       // point_value - max(set_sup, 0)
  bool certified = false;    // set_sup <= 1e-8 |u| and point_value > 0
};

/// Separates an exterior y from the region by H(Pr(y), y, 0). Throws
/// PointInSet for non-exterior y; projection errors propagate.
SeparationCertificate separate(const ConvexRegion& region, const Point& y, int probes,
                               std::uint64_t seed);

struct SupportResult {
  QuasiHyperplane plane;  // unit direction, offset 0
  int steps = 0;
  double last_change = 0.0;  // |u_k - u_{k-1}| in ambient coordinates
  double sup = 0.0;          // max over probes z of <u, log_p z>
  int probes_used = 0;
};

struct SupportOptions {
  int max_steps = 40;
  int probes = 500;
  std::uint64_t seed = 0;
};

/// Supporting quasi-hyperplane at a boundary point as the limit of
/// normalized separation directions from exterior points y_k -> p.
/// Throws NotBoundaryPoint or SupportNotCertified.
SupportResult supporting_plane(const ConvexRegion& region, const Point& p,
                               const SupportOptions& options = {});

class SupportNotCertified : public Error {
 public:
  SupportNotCertified(const std::string& message, int steps, double last_change, double sup)
      : Error(ErrorKind::SupportNotCertified, message), steps_(steps), last_change_(last_change),
        sup_(sup) {}

  int steps() const noexcept { return steps_; }
  double last_change() const noexcept { return last_change_; }
  double sup() const noexcept { return sup_; }

 private:
  int steps_;
  double last_change_;
  double sup_;
};

struct LinearizationReport {
  double point_value = 0.0;   // <u, log_p y>
  double cone_sup = 0.0;      // max normalized <u, v> over in-cone samples v
  int cone_samples = 0;       // decisive in_tangent_cone samples
  int undecided = 0;
  bool passed = false;        // cone_sup <= 1e-6 and point_value > 0
};

/// Checks in T_pM that v -> <u, v> separates log_p y (y = plane witness)
/// from sampled directions of the tangent cone at p.
LinearizationReport linearize(const QuasiHyperplane& plane, const ConvexRegion& region,
                              int probes, std::uint64_t seed);

}  // namespace geoconvex
