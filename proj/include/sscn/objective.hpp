#pragma once

#include "sscn/subset.hpp"
#include "sscn/types.hpp"

#include <cstddef>
#include <memory>
#include <optional>

namespace sscn {

/// Known or estimated Lipschitz constants of the gradient (L1) and Hessian (L2).
struct LipschitzEstimates {
  std::optional<double> gradient;
  std::optional<double> hessian;
};

/// Derivative oracles bound to one iterate. Optimizers hold one of these and
/// move it with `apply`, so implementations can keep x-dependent caches and
/// make subset queries cost O(tau) in the ambient dimension.
class PointState {
 public:
  virtual ~PointState() = default;

  virtual const Vector& x() const = 0;
  virtual double value() const = 0;
  virtual Vector gradient() const = 0;
  virtual Vector gradient_subset(const CoordinateSubset& s) const = 0;
  virtual Matrix hessian_block(const CoordinateSubset& s) const = 0;
  /// f(x + embed(h)) without moving the point.
  virtual double value_after(const CoordinateSubset& s, const Vector& h) const = 0;
  /// f(x + embed(h)) - f(x), computed without cancellation where possible.
  virtual double value_change(const CoordinateSubset& s, const Vector& h) const;
  /// grad f(x + delta * e_j) restricted to S.
  virtual Vector gradient_subset_shifted(const CoordinateSubset& s, std::size_t j, double delta) const = 0;
  /// x|_S += h.
  virtual void apply(const CoordinateSubset& s, const Vector& h) = 0;
};

/// Twice-differentiable objective with coordinate-restricted oracles.
/// Implementations are immutable after construction.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Matrix hessian(const Vector& x) const = 0;

  /// Defaults restrict the full oracles; overrides must agree exactly.
  virtual Vector gradient_subset(const Vector& x, const CoordinateSubset& s) const;
  virtual Matrix hessian_block(const Vector& x, const CoordinateSubset& s) const;
  /// f(x + embed(h)) - f(x); the default subtracts two values.
  virtual double value_change(const Vector& x, const CoordinateSubset& s, const Vector& h) const;

  /// Default state recomputes through the stateless oracles.
  virtual std::unique_ptr<PointState> bind(const Vector& x) const;

  const LipschitzEstimates& lipschitz() const { return lipschitz_; }
  void set_lipschitz(LipschitzEstimates l) { lipschitz_ = l; }

 protected:
  void check_point(const Vector& x) const;

 private:
  LipschitzEstimates lipschitz_;
};

/// Central finite-difference audit of the analytic subset oracles.
struct FiniteDiffReport {
  double grad_err = 0.0;    // max |analytic - FD| over S
  double hess_err = 0.0;    // max entry discrepancy over S x S
  double grad_scale = 0.0;  // max |analytic gradient entry|
  double hess_scale = 0.0;  // max |analytic Hessian entry|

  double grad_relative() const;
  double hess_relative() const;
};

FiniteDiffReport finite_diff_check(const Objective& obj, const Vector& x, const CoordinateSubset& s, double delta);

/// Largest observed ||H(x) - H(y)||_2 / ||x - y|| over random pairs with x in
/// the box [-radius, radius]^n around `center`, multiplied by `safety`.
double estimate_hessian_lipschitz(const Objective& obj, const Vector& center, double radius, std::size_t pairs,
                                  Rng& rng, double safety = 2.0);

double spectral_norm_symmetric(const Matrix& a);
double min_eigenvalue_symmetric(const Matrix& a);

}  // namespace sscn
