#include "sscn/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sscn {

Quadratic::Quadratic(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size() || b_.size() == 0) {
    throw DimensionError("Quadratic: A must be square and match b");
  }
  if (!a_.isApprox(a_.transpose(), 1e-14)) throw std::invalid_argument("Quadratic: A must be symmetric");
}

double Quadratic::value(const Vector& x) const {
  check_point(x);
  return 0.5 * x.dot(a_ * x) + b_.dot(x);
}

Vector Quadratic::gradient(const Vector& x) const {
  check_point(x);
  return a_ * x + b_;
}

Matrix Quadratic::hessian(const Vector& x) const {
  check_point(x);
  return a_;
}

double Quadratic::value_change(const Vector& x, const CoordinateSubset& s, const Vector& h) const {
  check_point(x);
  require_dimension(h.size(), static_cast<Index>(s.size()), "value_change");
  const Vector g = restrict_vector(gradient(x), s);
  return g.dot(h) + 0.5 * h.dot(restrict_matrix(a_, s) * h);
}

SaddleQuartic::SaddleQuartic(std::size_t n, double scale) : n_(n), scale_(scale) {
  if (n < 2) throw std::invalid_argument("SaddleQuartic: needs n >= 2");
}

double SaddleQuartic::value(const Vector& x) const {
  check_point(x);
  const double r2 = x.squaredNorm();
  return x[0] * x[0] - x[1] * x[1] + scale_ * r2 * r2;
}

Vector SaddleQuartic::gradient(const Vector& x) const {
  check_point(x);
  Vector g = (4.0 * scale_ * x.squaredNorm()) * x;
  g[0] += 2.0 * x[0];
  g[1] -= 2.0 * x[1];
  return g;
}

Matrix SaddleQuartic::hessian(const Vector& x) const {
  check_point(x);
  const auto n = static_cast<Index>(n_);
  Matrix h = (4.0 * scale_ * x.squaredNorm()) * Matrix::Identity(n, n) + (8.0 * scale_) * x * x.transpose();
  h(0, 0) += 2.0;
  h(1, 1) -= 2.0;
  return h;
}

double standard_normal(Rng& rng) {
  double u1 = uniform_unit(rng);
  while (u1 <= 0.0) u1 = uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SparseDataset make_synthetic_classification(std::size_t n_features, std::size_t n_samples, std::uint64_t seed,
                                            double label_noise) {
  if (n_features < 1 || n_samples < 1) throw std::invalid_argument("synthetic dataset needs n, m >= 1");
  Rng rng(seed);
  std::vector<double> truth(n_features);
  for (auto& w : truth) w = standard_normal(rng);

  SparseDataset d;
  d.n_features = n_features;
  d.rows.reserve(n_samples);
  d.labels.reserve(n_samples);
  const double feature_scale = 1.0 / std::sqrt(static_cast<double>(n_features));
  for (std::size_t i = 0; i < n_samples; ++i) {
    std::vector<FeatureEntry> row(n_features);
    double score = 0.0;
    for (std::size_t j = 0; j < n_features; ++j) {
      const double a = standard_normal(rng);
      row[j] = {j, a};
      score += truth[j] * a * feature_scale;
    }
    int label = score >= 0.0 ? 1 : -1;
    if (uniform_unit(rng) < label_noise) label = -label;
    d.rows.push_back(std::move(row));
    d.labels.push_back(label);
  }
  return d;
}

}  // namespace sscn
