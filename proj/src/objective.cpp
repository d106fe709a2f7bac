#include "sscn/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sscn {
namespace {

class GenericPoint final : public PointState {
 public:
  GenericPoint(const Objective& obj, Vector x) : obj_(obj), x_(std::move(x)), value_(obj_.value(x_)) {}

  const Vector& x() const override { return x_; }
  double value() const override { return value_; }
  Vector gradient() const override { return obj_.gradient(x_); }
  Vector gradient_subset(const CoordinateSubset& s) const override { return obj_.gradient_subset(x_, s); }
  Matrix hessian_block(const CoordinateSubset& s) const override { return obj_.hessian_block(x_, s); }

  double value_after(const CoordinateSubset& s, const Vector& h) const override {
    scratch_ = x_;
    add_on_subset(scratch_, s, h);
    return obj_.value(scratch_);
  }

  double value_change(const CoordinateSubset& s, const Vector& h) const override {
    return obj_.value_change(x_, s, h);
  }

  Vector gradient_subset_shifted(const CoordinateSubset& s, std::size_t j, double delta) const override {
    scratch_ = x_;
    scratch_[static_cast<Index>(j)] += delta;
    return obj_.gradient_subset(scratch_, s);
  }

  void apply(const CoordinateSubset& s, const Vector& h) override {
    add_on_subset(x_, s, h);
    value_ = obj_.value(x_);
  }

 private:
  const Objective& obj_;
  Vector x_;
  double value_;
  mutable Vector scratch_;
};

}  // namespace

double PointState::value_change(const CoordinateSubset& s, const Vector& h) const {
  return value_after(s, h) - value();
}

double Objective::value_change(const Vector& x, const CoordinateSubset& s, const Vector& h) const {
  Vector y = x;
  add_on_subset(y, s, h);
  return value(y) - value(x);
}

void Objective::check_point(const Vector& x) const {
  require_dimension(x.size(), static_cast<Index>(dimension()), "objective point");
}

Vector Objective::gradient_subset(const Vector& x, const CoordinateSubset& s) const {
  if (s.ambient() != dimension()) throw DimensionError("gradient_subset: subset ambient dimension mismatch");
  return restrict_vector(gradient(x), s);
}

Matrix Objective::hessian_block(const Vector& x, const CoordinateSubset& s) const {
  if (s.ambient() != dimension()) throw DimensionError("hessian_block: subset ambient dimension mismatch");
  return restrict_matrix(hessian(x), s);
}

std::unique_ptr<PointState> Objective::bind(const Vector& x) const {
  check_point(x);
  return std::make_unique<GenericPoint>(*this, x);
}

double FiniteDiffReport::grad_relative() const { return grad_err / std::max(grad_scale, 1e-12); }
double FiniteDiffReport::hess_relative() const { return hess_err / std::max(hess_scale, 1e-12); }

FiniteDiffReport finite_diff_check(const Objective& obj, const Vector& x, const CoordinateSubset& s, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("finite_diff_check: delta must be positive");
  const Vector g = obj.gradient_subset(x, s);
  const Matrix h = obj.hessian_block(x, s);
  FiniteDiffReport r;
  r.grad_scale = g.lpNorm<Eigen::Infinity>();
  r.hess_scale = h.lpNorm<Eigen::Infinity>();

  Vector xp = x;
  Vector xm = x;
  for (std::size_t c = 0; c < s.size(); ++c) {
    const auto j = static_cast<Index>(s[c]);
    xp[j] = x[j] + delta;
    xm[j] = x[j] - delta;
    const double fd = (obj.value(xp) - obj.value(xm)) / (2.0 * delta);
    r.grad_err = std::max(r.grad_err, std::abs(fd - g[static_cast<Index>(c)]));
    const Vector column = (obj.gradient_subset(xp, s) - obj.gradient_subset(xm, s)) / (2.0 * delta);
    r.hess_err = std::max(r.hess_err, (column - h.col(static_cast<Index>(c))).lpNorm<Eigen::Infinity>());
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return r;
}

double spectral_norm_symmetric(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue_symmetric(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

double estimate_hessian_lipschitz(const Objective& obj, const Vector& center, double radius, std::size_t pairs,
                                  Rng& rng, double safety) {
  const auto n = static_cast<Index>(obj.dimension());
  require_dimension(center.size(), n, "estimate_hessian_lipschitz");
  double best = 0.0;
  for (std::size_t p = 0; p < pairs; ++p) {
    Vector x(n);
    Vector d(n);
    for (Index i = 0; i < n; ++i) {
      x[i] = center[i] + radius * (2.0 * uniform_unit(rng) - 1.0);
      d[i] = 2.0 * uniform_unit(rng) - 1.0;
    }
    // Step lengths spread over three decades so both local and global
    // variation of the Hessian are probed.
    const double length = radius * std::pow(10.0, -3.0 * uniform_unit(rng));
    d *= length / d.norm();
    const double ratio = spectral_norm_symmetric(obj.hessian(x + d) - obj.hessian(x)) / d.norm();
    if (std::isfinite(ratio)) best = std::max(best, ratio);
  }
  return safety * best;
}

}  // namespace sscn
