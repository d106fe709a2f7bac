#include "sscn/cubic_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sscn {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_model(const CubicModel& model) {
  if (!(model.m > 0.0)) throw std::invalid_argument("cubic model: M must be positive");
  if (model.q.rows() != model.g.size() || model.q.cols() != model.g.size()) {
    throw DimensionError("cubic model: Q must be tau x tau with tau = dim(g)");
  }
  if (!model.g.allFinite() || !model.q.allFinite() || !std::isfinite(model.f_at_x)) {
    throw std::invalid_argument("cubic model: non-finite entries");
  }
  const double scale = model.q.size() ? std::max(1.0, model.q.cwiseAbs().maxCoeff()) : 1.0;
  if (model.q.size() && (model.q - model.q.transpose()).cwiseAbs().maxCoeff() > 64 * std::numeric_limits<double>::epsilon() * scale) {
    throw std::invalid_argument("cubic model: Q must be symmetric");
  }
}

}  // namespace

void validate(const CurvatureSpec& spec) {
  std::visit(overloaded{
                 [](const ExactCurvature&) {},
                 [](const ZeroCurvature&) {},
                 [](const LazyCurvature& s) {
                   if (s.period < 1) throw std::invalid_argument("lazy curvature: period must be >= 1");
                   if (!(s.radius > 0.0)) throw std::invalid_argument("lazy curvature: radius must be positive");
                 },
                 [](const FiniteDifferenceCurvature& s) {
                   if (s.delta && !(*s.delta > 0.0)) throw std::invalid_argument("finite differences: delta must be > 0");
                 },
             },
             spec);
}

CubicModel make_model(double f_at_x, Vector g, Matrix q, double m) {
  CubicModel model;
  model.f_at_x = f_at_x;
  model.g = std::move(g);
  model.q = std::move(q);
  model.m = m;
  check_model(model);
  return model;
}

void LazyCache::prepare(const Objective& obj, const PointState& point, const LazyCurvature& spec) {
  const bool due = !anchor_ || uses_ >= spec.period || std::sqrt(drift_sq_) > spec.radius;
  if (due) {
    anchor_ = obj.bind(point.x());
    displacement_ = Vector::Zero(point.x().size());
    drift_sq_ = 0.0;
    uses_ = 0;
    ++refreshes_;
  }
  ++uses_;
}

void LazyCache::note_step(const CoordinateSubset& s, const Vector& h) {
  if (!anchor_) return;
  for (std::size_t k = 0; k < s.size(); ++k) {
    double& d = displacement_[static_cast<Index>(s[k])];
    const double next = d + h[static_cast<Index>(k)];
    drift_sq_ += next * next - d * d;
    d = next;
  }
  drift_sq_ = std::max(drift_sq_, 0.0);
}

double LazyCache::drift() const { return std::sqrt(drift_sq_); }

double default_fd_delta(const Vector& x) { return 1e-4 * (1.0 + x.lpNorm<Eigen::Infinity>()); }

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

CubicModel build_model(const PointState& point, const CoordinateSubset& s, const CurvatureSpec& spec, double m,
                       const LazyCache* lazy_cache, const LipschitzEstimates& lipschitz) {
  if (!(m > 0.0)) throw std::invalid_argument("build_model: M must be positive");
  if (static_cast<Index>(s.ambient()) != point.x().size()) throw DimensionError("build_model: subset/point mismatch");
  CubicModel model;
  model.f_at_x = point.value();
  model.g = point.gradient_subset(s);
  model.m = m;
  model.subset = s;
  const auto t = static_cast<Index>(s.size());

  std::visit(overloaded{
                 [&](const ExactCurvature&) {
                   model.q = point.hessian_block(s);
                   model.sigma_bound = 0.0;
                 },
                 [&](const ZeroCurvature&) {
                   model.q = Matrix::Zero(t, t);
                   model.sigma_bound = lipschitz.gradient;
                 },
                 [&](const LazyCurvature&) {
                   if (!lazy_cache || !lazy_cache->has_anchor()) {
                     throw std::logic_error("build_model: lazy curvature needs a prepared anchor cache");
                   }
                   model.q = lazy_cache->anchor().hessian_block(s);
                   if (lipschitz.hessian) model.sigma_bound = *lipschitz.hessian * lazy_cache->drift();
                 },
                 [&](const FiniteDifferenceCurvature& fd) {
                   const double delta = fd.delta.value_or(default_fd_delta(point.x()));
                   Matrix q(t, t);
                   for (Index i = 0; i < t; ++i) {
                     q.row(i) = ((point.gradient_subset_shifted(s, s[static_cast<std::size_t>(i)], delta) - model.g) /
                                 delta)
                                    .transpose();
                   }
                   model.q = symmetrize(q);
                   if (lipschitz.hessian) {
                     model.sigma_bound = std::sqrt(static_cast<double>(t)) * *lipschitz.hessian * delta / 2.0;
                   }
                 },
             },
             spec);

  if (!model.q.allFinite() || !model.g.allFinite()) {
    throw std::runtime_error("build_model: non-finite derivative information");
  }
  return model;
}

CubicModel build_model(const Objective& obj, const Vector& x, const CoordinateSubset& s, const CurvatureSpec& spec,
                       double m) {
  if (std::holds_alternative<LazyCurvature>(spec)) {
    throw std::logic_error("build_model: lazy curvature needs a point state and cache");
  }
  const auto point = obj.bind(x);
  return build_model(*point, s, spec, m, nullptr, obj.lipschitz());
}

double model_value(const CubicModel& model, const Vector& h) {
  require_dimension(h.size(), model.g.size(), "model_value");
  const double r = h.norm();
  return model.f_at_x + model.g.dot(h) + 0.5 * h.dot(model.q * h) + model.m / 6.0 * r * r * r;
}

Vector model_gradient(const CubicModel& model, const Vector& h) {
  require_dimension(h.size(), model.g.size(), "model_gradient");
  return model.g + model.q * h + (0.5 * model.m * h.norm()) * h;
}

}  // namespace sscn
