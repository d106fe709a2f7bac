#pragma once

#include "sscn/objective.hpp"

#include <limits>
#include <memory>
#include <optional>
#include <variant>

namespace sscn {

struct ExactCurvature {};
struct ZeroCurvature {};
/// Hessian blocks taken at an anchor point refreshed every `period`
/// iterations or once the iterate drifts more than `radius` away.
struct LazyCurvature {
  std::size_t period = 5;
  double radius = std::numeric_limits<double>::infinity();
};
/// Forward differences of the subset gradient, then symmetrized. Without a
/// delta the step is 1e-4 * (1 + ||x||_inf).
struct FiniteDifferenceCurvature {
  std::optional<double> delta;
};

using CurvatureSpec = std::variant<ExactCurvature, ZeroCurvature, LazyCurvature, FiniteDifferenceCurvature>;

void validate(const CurvatureSpec& spec);

/// m(h) = f + <g_S, h> + 1/2 <Q_S h, h> + (M/6) ||h||^3 over R^tau.
struct CubicModel {
  double f_at_x = 0.0;
  Vector g;
  Matrix q;
  double m = 1.0;
  CoordinateSubset subset;
  std::optional<double> sigma_bound;

  std::size_t dimension() const { return static_cast<std::size_t>(g.size()); }
};

/// Builds and checks a model from raw parts (tests, validation suites).
CubicModel make_model(double f_at_x, Vector g, Matrix q, double m);

/// Anchor state for lazy curvature. Tracks x - x_anchor incrementally so the
/// drift test costs O(tau) per step.
class LazyCache {
 public:
  /// Re-anchors at `point` when due; counts one use either way.
  void prepare(const Objective& obj, const PointState& point, const LazyCurvature& spec);
  void note_step(const CoordinateSubset& s, const Vector& h);

  bool has_anchor() const { return static_cast<bool>(anchor_); }
  const PointState& anchor() const { return *anchor_; }
  double drift() const;
  std::size_t refreshes() const { return refreshes_; }

 private:
  std::unique_ptr<PointState> anchor_;
  Vector displacement_;
  double drift_sq_ = 0.0;
  std::size_t uses_ = 0;
  std::size_t refreshes_ = 0;
};

/// Assembles the tau-dimensional model at `point` for subset S. Lazy
/// curvature requires a prepared cache.
CubicModel build_model(const PointState& point, const CoordinateSubset& s, const CurvatureSpec& spec, double m,
                       const LazyCache* lazy_cache, const LipschitzEstimates& lipschitz = {});

/// Convenience overload that binds `x` first. Lazy curvature is rejected here.
CubicModel build_model(const Objective& obj, const Vector& x, const CoordinateSubset& s, const CurvatureSpec& spec,
                       double m);

double model_value(const CubicModel& model, const Vector& h);
/// g + Q h + (M/2) ||h|| h.
Vector model_gradient(const CubicModel& model, const Vector& h);

Matrix symmetrize(const Matrix& a);

/// Default forward-difference step at x.
double default_fd_delta(const Vector& x);

}  // namespace sscn
