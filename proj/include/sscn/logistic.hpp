#pragma once

#include "sscn/dataset.hpp"
#include "sscn/kernels.hpp"
#include "sscn/objective.hpp"

namespace sscn {

/// Logistic loss with the non-convex penalty lambda * sum_j x_j^2 / (1 + x_j^2):
///
///   f(x) = s * sum_i log(1 + exp(-y_i <a_i, x>)) + lambda * sum_j r(x_j),
///
/// with s = 1/m when `normalize` is set, else 1.
class RegularizedLogistic final : public Objective {
 public:
  RegularizedLogistic(const SparseDataset& data, double lambda, bool normalize = true);

  std::size_t dimension() const override { return n_; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;
  Vector gradient_subset(const Vector& x, const CoordinateSubset& s) const override;
  Matrix hessian_block(const Vector& x, const CoordinateSubset& s) const override;
  std::unique_ptr<PointState> bind(const Vector& x) const override;

  double lambda() const { return lambda_; }
  bool normalized() const { return normalize_; }
  std::size_t samples() const { return m_; }

  /// Upper bound on the gradient Lipschitz constant: s * ||A||_2^2 / 4 + 2 lambda.
  double gradient_lipschitz_bound() const;

  static double penalty(double t);     // r(t) = t^2 / (1 + t^2)
  static double penalty_d1(double t);  // 2t / (1 + t^2)^2
  static double penalty_d2(double t);  // 2(1 - 3t^2) / (1 + t^2)^3

  // Building blocks shared with the bound point state.
  double value_from_margins(const Vector& z, double penalty_sum) const;
  // `x_s` holds the iterate restricted to S.
  Vector gradient_from_margins(const Vector& z, const Vector& x_s, const CoordinateSubset& s) const;
  Matrix hessian_from_margins(const Vector& z, const Vector& x_s, const CoordinateSubset& s) const;
  double penalty_sum(const Vector& x) const;
  void margins(const Vector& x, Vector& z) const;
  const kernels::CompressedMatrix& csc() const { return csc_; }
  const Vector& labels() const { return labels_; }
  double scale() const { return scale_; }

 private:
  std::size_t n_;
  std::size_t m_;
  double lambda_;
  bool normalize_;
  double scale_;
  kernels::CompressedMatrix csr_;
  kernels::CompressedMatrix csc_;
  Vector labels_;
};

}  // namespace sscn
