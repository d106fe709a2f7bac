#pragma once

#include "sscn/dataset.hpp"
#include "sscn/objective.hpp"

namespace sscn {

/// f(x) = 1/2 x^T A x + b^T x with symmetric A.
class Quadratic final : public Objective {
 public:
  Quadratic(Matrix a, Vector b);

  std::size_t dimension() const override { return static_cast<std::size_t>(b_.size()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;
  /// <(A x + b)_S, h> + 1/2 h^T A_SS h.
  double value_change(const Vector& x, const CoordinateSubset& s, const Vector& h) const override;

  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }

 private:
  Matrix a_;
  Vector b_;
};

/// f(x) = x_1^2 - x_2^2 + s ||x||^4 (n >= 2): a strict saddle at the origin
/// with lambda_min(hessian(0)) = -2 and minimizers at x_2 = +-1/sqrt(2s).
class SaddleQuartic final : public Objective {
 public:
  SaddleQuartic(std::size_t n, double scale);

  std::size_t dimension() const override { return n_; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;

 private:
  std::size_t n_;
  double scale_;
};

/// Standard normal draw by Box-Muller on the pinned generator.
double standard_normal(Rng& rng);

/// Dense Gaussian design with labels from a random linear model, a fraction
/// of them flipped so the data are not separable.
SparseDataset make_synthetic_classification(std::size_t n_features, std::size_t n_samples, std::uint64_t seed,
                                            double label_noise = 0.1);

}  // namespace sscn
