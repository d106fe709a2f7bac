#include "sscn/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace sscn {
namespace {

kernels::CompressedMatrix build_csr(const SparseDataset& d) {
  kernels::CompressedMatrix a;
  a.rows = d.n_samples();
  a.cols = d.n_features;
  a.outer.reserve(a.rows + 1);
  a.outer.push_back(0);
  for (const auto& row : d.rows) {
    for (const auto& e : row) {
      if (e.index >= d.n_features) throw std::invalid_argument("dataset feature index out of range");
      a.inner.push_back(e.index);
      a.values.push_back(e.value);
    }
    a.outer.push_back(a.inner.size());
  }
  return a;
}

kernels::CompressedMatrix transpose(const kernels::CompressedMatrix& a) {
  kernels::CompressedMatrix t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.outer.assign(a.cols + 1, 0);
  for (std::size_t j : a.inner) ++t.outer[j + 1];
  for (std::size_t j = 0; j < a.cols; ++j) t.outer[j + 1] += t.outer[j];
  t.inner.resize(a.nnz());
  t.values.resize(a.nnz());
  std::vector<std::size_t> cursor(t.outer.begin(), t.outer.end() - 1);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t p = a.outer[i]; p < a.outer[i + 1]; ++p) {
      const std::size_t q = cursor[a.inner[p]]++;
      t.inner[q] = i;
      t.values[q] = a.values[p];
    }
  }
  return t;
}

/// Point state that keeps the margins z = y .* (A x) current, so subset
/// queries and trial steps cost O(nnz of the touched columns) plus O(m)
/// for loss sums, never O(n).
class LogisticPoint final : public PointState {
 public:
  LogisticPoint(const RegularizedLogistic& obj, Vector x) : obj_(obj), x_(std::move(x)) {
    obj_.margins(x_, z_);
    loss_sum_ = kernels::logistic_loss_sum(z_);
    penalty_sum_ = obj_.penalty_sum(x_);
    touched_mark_.assign(static_cast<std::size_t>(z_.size()), false);
  }

  const Vector& x() const override { return x_; }
  double value() const override { return combine(loss_sum_, penalty_sum_); }
  Vector gradient() const override {
    const auto full = CoordinateSubset::full(obj_.dimension());
    return obj_.gradient_from_margins(z_, x_, full);
  }
  Vector gradient_subset(const CoordinateSubset& s) const override {
    return obj_.gradient_from_margins(z_, restrict_vector(x_, s), s);
  }
  Matrix hessian_block(const CoordinateSubset& s) const override {
    return obj_.hessian_from_margins(z_, restrict_vector(x_, s), s);
  }

  double value_after(const CoordinateSubset& s, const Vector& h) const override {
    require_dimension(h.size(), static_cast<Index>(s.size()), "value_after");
    shift_margins(s, h);
    const double loss = kernels::logistic_loss_sum(z_);
    restore_margins();
    return combine(loss, penalty_sum_ + penalty_delta(s, h));
  }

  // Only samples touching S change. Each term uses
  // l(z + d) - l(z) = log1p(sigma(-z) expm1(-d)) with d accumulated directly.
  double value_change(const CoordinateSubset& s, const Vector& h) const override {
    require_dimension(h.size(), static_cast<Index>(s.size()), "value_change");
    const auto& csc = obj_.csc();
    const auto& y = obj_.labels();
    if (dz_.size() != touched_mark_.size()) dz_.assign(touched_mark_.size(), 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const std::size_t j = s[k];
      const double hk = h[static_cast<Index>(k)];
      for (std::size_t p = csc.outer[j]; p < csc.outer[j + 1]; ++p) {
        const std::size_t i = csc.inner[p];
        if (!touched_mark_[i]) {
          touched_mark_[i] = true;
          touched_.push_back(i);
        }
        dz_[i] += y[static_cast<Index>(i)] * csc.values[p] * hk;
      }
    }
    double d = 0.0;
    for (std::size_t i : touched_) {
      d += std::log1p(kernels::sigmoid_neg(z_[static_cast<Index>(i)]) * std::expm1(-dz_[i]));
      dz_[i] = 0.0;
    }
    clear_marks();
    touched_.clear();
    return obj_.scale() * d + obj_.lambda() * penalty_delta(s, h);
  }

  Vector gradient_subset_shifted(const CoordinateSubset& s, std::size_t j, double delta) const override {
    const std::vector<std::size_t> column{j};
    const CoordinateSubset single(column, obj_.dimension());
    shift_margins(single, Vector::Constant(1, delta));
    Vector x_s = restrict_vector(x_, s);
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] == j) x_s[static_cast<Index>(k)] += delta;
    }
    Vector g = obj_.gradient_from_margins(z_, x_s, s);
    restore_margins();
    return g;
  }

  void apply(const CoordinateSubset& s, const Vector& h) override {
    require_dimension(h.size(), static_cast<Index>(s.size()), "apply");
    shift_margins(s, h);
    clear_marks();
    touched_.clear();
    saved_.clear();
    penalty_sum_ += penalty_delta(s, h);
    add_on_subset(x_, s, h);
    loss_sum_ = kernels::logistic_loss_sum(z_);
  }

 private:
  double combine(double loss, double penalty) const { return obj_.scale() * loss + obj_.lambda() * penalty; }

  double penalty_delta(const CoordinateSubset& s, const Vector& h) const {
    double d = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double old = x_[static_cast<Index>(s[k])];
      const double hk = h[static_cast<Index>(k)];
      const double now = old + hk;
      d += hk * (old + now) / ((1.0 + old * old) * (1.0 + now * now));
    }
    return d;
  }

  // z_i += y_i * sum_k A_{i, s_k} h_k on the touched samples, remembering
  // their original values so `restore_margins` is exact.
  void shift_margins(const CoordinateSubset& s, const Vector& h) const {
    const auto& csc = obj_.csc();
    const auto& y = obj_.labels();
    for (std::size_t k = 0; k < s.size(); ++k) {
      const std::size_t j = s[k];
      const double hk = h[static_cast<Index>(k)];
      for (std::size_t p = csc.outer[j]; p < csc.outer[j + 1]; ++p) {
        const std::size_t i = csc.inner[p];
        if (!touched_mark_[i]) {
          touched_mark_[i] = true;
          touched_.push_back(i);
          saved_.push_back(z_[static_cast<Index>(i)]);
        }
        z_[static_cast<Index>(i)] += y[static_cast<Index>(i)] * csc.values[p] * hk;
      }
    }
  }

  void restore_margins() const {
    for (std::size_t t = 0; t < touched_.size(); ++t) z_[static_cast<Index>(touched_[t])] = saved_[t];
    clear_marks();
    touched_.clear();
    saved_.clear();
  }

  void clear_marks() const {
    for (std::size_t i : touched_) touched_mark_[i] = false;
  }

  const RegularizedLogistic& obj_;
  Vector x_;
  mutable Vector z_;
  double loss_sum_ = 0.0;
  double penalty_sum_ = 0.0;
  mutable std::vector<bool> touched_mark_;
  mutable std::vector<std::size_t> touched_;
  mutable std::vector<double> saved_;
  mutable std::vector<double> dz_;
};

}  // namespace

RegularizedLogistic::RegularizedLogistic(const SparseDataset& data, double lambda, bool normalize)
    : n_(data.n_features),
      m_(data.n_samples()),
      lambda_(lambda),
      normalize_(normalize),
      scale_(normalize ? 1.0 / static_cast<double>(data.n_samples()) : 1.0),
      csr_(build_csr(data)),
      csc_(transpose(csr_)),
      labels_(static_cast<Index>(data.n_samples())) {
  if (n_ < 1 || m_ < 1) throw std::invalid_argument("RegularizedLogistic: empty dataset");
  if (data.labels.size() != m_) throw std::invalid_argument("RegularizedLogistic: label count mismatch");
  if (!(lambda >= 0.0)) throw std::invalid_argument("RegularizedLogistic: lambda must be nonnegative");
  for (std::size_t i = 0; i < m_; ++i) labels_[static_cast<Index>(i)] = data.labels[i] > 0 ? 1.0 : -1.0;
}

double RegularizedLogistic::penalty(double t) {
  const double t2 = t * t;
  return t2 / (1.0 + t2);
}

double RegularizedLogistic::penalty_d1(double t) {
  const double q = 1.0 + t * t;
  return 2.0 * t / (q * q);
}

double RegularizedLogistic::penalty_d2(double t) {
  const double t2 = t * t;
  const double q = 1.0 + t2;
  return 2.0 * (1.0 - 3.0 * t2) / (q * q * q);
}

double RegularizedLogistic::penalty_sum(const Vector& x) const {
  double s = 0.0;
  for (Index j = 0; j < x.size(); ++j) s += penalty(x[j]);
  return s;
}

void RegularizedLogistic::margins(const Vector& x, Vector& z) const { kernels::margins(csr_, labels_, x, z); }

double RegularizedLogistic::value_from_margins(const Vector& z, double penalty_total) const {
  return scale_ * kernels::logistic_loss_sum(z) + lambda_ * penalty_total;
}

Vector RegularizedLogistic::gradient_from_margins(const Vector& z, const Vector& x_s, const CoordinateSubset& s) const {
  Vector g(static_cast<Index>(s.size()));
  kernels::column_gradients(csc_, labels_, z, s.indices(), std::span<double>(g.data(), s.size()));
  for (Index k = 0; k < g.size(); ++k) g[k] = scale_ * g[k] + lambda_ * penalty_d1(x_s[k]);
  return g;
}

Matrix RegularizedLogistic::hessian_from_margins(const Vector& z, const Vector& x_s, const CoordinateSubset& s) const {
  const auto groups = kernels::group_by_sample(csc_, s.indices());
  std::vector<double> weights(groups.samples.size());
  for (std::size_t g = 0; g < weights.size(); ++g) {
    const double zi = z[static_cast<Index>(groups.samples[g])];
    weights[g] = scale_ * kernels::sigmoid_neg(zi) * kernels::sigmoid_neg(-zi);
  }
  Matrix h = kernels::weighted_gram(groups, weights, s.size());
  for (Index k = 0; k < h.rows(); ++k) h(k, k) += lambda_ * penalty_d2(x_s[k]);
  return h;
}

double RegularizedLogistic::value(const Vector& x) const {
  check_point(x);
  Vector z;
  margins(x, z);
  return value_from_margins(z, penalty_sum(x));
}

Vector RegularizedLogistic::gradient(const Vector& x) const {
  check_point(x);
  Vector z;
  margins(x, z);
  return gradient_from_margins(z, x, CoordinateSubset::full(n_));
}

Matrix RegularizedLogistic::hessian(const Vector& x) const {
  check_point(x);
  Vector z;
  margins(x, z);
  return hessian_from_margins(z, x, CoordinateSubset::full(n_));
}

Vector RegularizedLogistic::gradient_subset(const Vector& x, const CoordinateSubset& s) const {
  check_point(x);
  if (s.ambient() != n_) throw DimensionError("gradient_subset: subset ambient dimension mismatch");
  Vector z;
  margins(x, z);
  return gradient_from_margins(z, restrict_vector(x, s), s);
}

Matrix RegularizedLogistic::hessian_block(const Vector& x, const CoordinateSubset& s) const {
  check_point(x);
  if (s.ambient() != n_) throw DimensionError("hessian_block: subset ambient dimension mismatch");
  Vector z;
  margins(x, z);
  return hessian_from_margins(z, restrict_vector(x, s), s);
}

std::unique_ptr<PointState> RegularizedLogistic::bind(const Vector& x) const {
  check_point(x);
  return std::make_unique<LogisticPoint>(*this, x);
}

double RegularizedLogistic::gradient_lipschitz_bound() const {
  // Power iteration on A^T A; the Rayleigh quotient of the last iterate is
  // inflated slightly to stay an upper bound in practice.
  Vector v = Vector::Constant(static_cast<Index>(n_), 1.0 / std::sqrt(static_cast<double>(n_)));
  double estimate = 0.0;
  Vector av(static_cast<Index>(m_));
  for (int it = 0; it < 200; ++it) {
    av.setZero();
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t p = csr_.outer[i]; p < csr_.outer[i + 1]; ++p)
        av[static_cast<Index>(i)] += csr_.values[p] * v[static_cast<Index>(csr_.inner[p])];
    Vector w = Vector::Zero(static_cast<Index>(n_));
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t p = csc_.outer[j]; p < csc_.outer[j + 1]; ++p)
        w[static_cast<Index>(j)] += csc_.values[p] * av[static_cast<Index>(csc_.inner[p])];
    const double norm = w.norm();
    if (norm == 0.0) break;
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - estimate) <= 1e-12 * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return 1.01 * scale_ * estimate / 4.0 + 2.0 * lambda_;
}

}  // namespace sscn
