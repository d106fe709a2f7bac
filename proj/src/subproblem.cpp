#include "sscn/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sscn {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_inputs(const CubicModel& model, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("cubic subproblem: tol must be positive");
  if (!(model.m > 0.0)) throw std::invalid_argument("cubic subproblem: M must be positive");
  if (model.q.rows() != model.g.size() || model.q.cols() != model.g.size()) {
    throw DimensionError("cubic subproblem: Q must be tau x tau");
  }
  if (!model.q.allFinite() || !model.g.allFinite()) {
    throw std::domain_error("cubic subproblem: non-finite entries in the model");
  }
}

void fill_certificates(const CubicModel& model, SubproblemSolution& sol, double lambda_min) {
  sol.r = sol.h.norm();
  sol.alpha = 0.5 * model.m * sol.r;
  sol.stationarity_residual = (model.g + model.q * sol.h + sol.alpha * sol.h).norm();
  sol.min_shifted_eig = lambda_min + sol.alpha;
}

// Unit vector with its first clearly nonzero entry made positive.
Vector oriented(Vector v) {
  const double scale = v.lpNorm<Eigen::Infinity>();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-10 * scale) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  return v;
}

// Secular function in the eigenbasis: returns ||h(alpha)|| and
// d||h||/dalpha for h_i = -gt_i / (lambda_i + alpha).
struct NormAndSlope {
  double norm;
  double slope;
};

NormAndSlope step_norm(const Vector& lambda, const Vector& gt, double alpha) {
  double sq = 0.0;
  double cube = 0.0;
  for (Index i = 0; i < gt.size(); ++i) {
    if (gt[i] == 0.0) continue;
    const double d = lambda[i] + alpha;
    const double ratio = gt[i] / d;
    sq += ratio * ratio;
    cube += ratio * ratio / d;
  }
  const double norm = std::sqrt(sq);
  return {norm, norm > 0.0 ? -cube / norm : 0.0};
}

// Root of ||h(alpha)|| = 2 alpha / M on (lo, hi), where the left side exceeds
// the right near lo and not at hi. Newton on 1/||h|| - M/(2 alpha), which is
// increasing and concave, safeguarded by bisection.
double secular_root(const Vector& lambda, const Vector& gt, double m, double lo, double hi) {
  double alpha = hi;
  for (int it = 0; it < 500; ++it) {
    const auto [norm, slope] = step_norm(lambda, gt, alpha);
    const double target = 2.0 * alpha / m;
    if (norm == target) return alpha;
    if (norm > target) {
      lo = alpha;
    } else {
      hi = alpha;
    }
    if (hi - lo <= 4.0 * kEps * hi) break;

    double next = 0.5 * (lo + hi);
    if (norm > 0.0 && alpha > 0.0) {
      const double chi = 1.0 / norm - 0.5 * m / alpha;
      const double dchi = -slope / (norm * norm) + 0.5 * m / (alpha * alpha);
      if (dchi > 0.0) {
        const double newton = alpha - chi / dchi;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    if (next == alpha) break;
    alpha = next;
  }
  return alpha;
}

}  // namespace

SubproblemSolution solve_global(const CubicModel& model, double tol) {
  check_inputs(model, tol);
  const Index t = model.g.size();
  const double m = model.m;
  SubproblemSolution sol;

  Eigen::SelfAdjointEigenSolver<Matrix> es(model.q);
  if (es.info() != Eigen::Success) throw std::runtime_error("solve_global: eigendecomposition failed");
  const Vector& lambda = es.eigenvalues();
  const Matrix& v = es.eigenvectors();
  const double lambda_min = lambda[0];
  Vector gt = v.transpose() * model.g;
  const double g_norm = gt.norm();
  const double alpha_lo = std::max(0.0, -lambda_min);

  if (g_norm == 0.0 && lambda_min >= 0.0) {
    sol.h = Vector::Zero(t);
    fill_certificates(model, sol, lambda_min);
    return sol;
  }

  // Components on the minimal eigenspace; negligible ones are dropped so
  // the hard case is recognized.
  const double spread = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  double min_space_sq = 0.0;
  Index min_space_dim = 0;
  for (Index i = 0; i < t && lambda[i] - lambda_min <= 1e-12 * spread; ++i) {
    min_space_sq += gt[i] * gt[i];
    ++min_space_dim;
  }
  const bool orthogonal = std::sqrt(min_space_sq) < 1e-12 * g_norm || g_norm == 0.0;

  if (lambda_min <= 0.0 && orthogonal) {
    for (Index i = 0; i < min_space_dim; ++i) gt[i] = 0.0;
    const double pinv_norm = step_norm(lambda, gt, alpha_lo).norm;
    const double radius = 2.0 * alpha_lo / m;
    if (pinv_norm <= radius) {
      Vector ht(t);
      for (Index i = 0; i < t; ++i) ht[i] = gt[i] == 0.0 ? 0.0 : -gt[i] / (lambda[i] + alpha_lo);
      const double extra = std::sqrt(std::max(0.0, radius * radius - pinv_norm * pinv_norm));
      sol.h = v * ht + extra * oriented(v.col(0));
      sol.hard_case = true;
      fill_certificates(model, sol, lambda_min);
      return sol;
    }
  }

  const double hi = alpha_lo + std::sqrt(0.5 * m * g_norm);
  const double alpha = secular_root(lambda, gt, m, alpha_lo, hi);
  Vector ht(t);
  for (Index i = 0; i < t; ++i) ht[i] = gt[i] == 0.0 ? 0.0 : -gt[i] / (lambda[i] + alpha);
  sol.h = v * ht;
  fill_certificates(model, sol, lambda_min);
  return sol;
}

double dual_objective(const CubicModel& model, double alpha) {
  const Index t = model.g.size();
  Eigen::LLT<Matrix> llt(model.q + alpha * Matrix::Identity(t, t));
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Vector u = llt.solve(model.g);
  return -0.5 * u.dot(model.g) - 2.0 * alpha * alpha * alpha / (3.0 * model.m * model.m);
}

SubproblemSolution solve_alpha_dual(const CubicModel& model, double tol) {
  check_inputs(model, tol);
  const Index t = model.g.size();
  const double m = model.m;
  const Matrix identity = Matrix::Identity(t, t);
  SubproblemSolution sol;

  // Gershgorin bound: Q + alpha I is positive definite past this shift.
  double shift = 0.0;
  for (Index i = 0; i < t; ++i) {
    shift = std::max(shift, model.q.row(i).cwiseAbs().sum() - std::abs(model.q(i, i)) - model.q(i, i));
  }

  // Reported certificate only; the solve below never uses the spectrum.
  Eigen::SelfAdjointEigenSolver<Matrix> es(model.q, Eigen::EigenvaluesOnly);
  const double lambda_min = es.eigenvalues()[0];

  if (model.g.norm() == 0.0) {
    const double jitter = 1e-14 * std::max(1.0, shift);
    Eigen::LLT<Matrix> llt(model.q + jitter * identity);
    sol.h = Vector::Zero(t);
    sol.hard_case = llt.info() != Eigen::Success;
    fill_certificates(model, sol, lambda_min);
    return sol;
  }

  // Bisection on the sign of D'(alpha) = ||h||^2/2 - 2 alpha^2 / M^2; the
  // infeasible region counts as "increasing" since ||h|| blows up at its edge.
  double lo = 0.0;
  double hi = shift + std::sqrt(0.5 * m * model.g.norm()) + 1.0;
  Vector h_hi;
  for (int it = 0; it < 400 && hi - lo > 4.0 * kEps * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    Eigen::LLT<Matrix> llt(model.q + mid * identity);
    if (llt.info() != Eigen::Success) {
      lo = mid;
      continue;
    }
    const Vector h = -llt.solve(model.g);
    if (h.norm() > 2.0 * mid / m) {
      lo = mid;
    } else {
      hi = mid;
      h_hi = h;
    }
  }
  if (h_hi.size() == 0) {
    Eigen::LLT<Matrix> llt(model.q + hi * identity);
    h_hi = -llt.solve(model.g);
  }
  sol.h = h_hi;
  const double expected = 2.0 * hi / m;
  sol.hard_case = std::abs(sol.h.norm() - expected) > 1e-6 * std::max(1.0, expected);
  fill_certificates(model, sol, lambda_min);
  if (!sol.hard_case && sol.stationarity_residual > tol * std::max(1.0, model.g.norm())) sol.hard_case = true;
  return sol;
}

Vector closed_form_zero_curvature(const Vector& g, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("closed_form_zero_curvature: M must be positive");
  const double g_norm = g.norm();
  if (g_norm == 0.0) return Vector::Zero(g.size());
  const double eta = std::sqrt(2.0 / (m * g_norm));
  return -eta * g;
}

double minimizer_norm_bound(const CubicModel& model) {
  const double q = model.q.norm();  // Frobenius, >= spectral
  const double g = model.g.norm();
  return 3.0 * (0.5 * q + std::sqrt(0.25 * q * q + (2.0 * model.m / 3.0) * g)) / model.m;
}

namespace {

double golden_minimize(const CubicModel& model, Vector& h, Index coord, double width) {
  const double center = h[coord];
  auto eval = [&](double x) {
    h[coord] = x;
    return model_value(model, h);
  };
  constexpr double kInvPhi = 0.6180339887498949;
  double a = center - width;
  double b = center + width;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  for (int it = 0; it < 80 && b - a > 1e-15 * (1.0 + std::abs(center)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }
  const double f_center = eval(center);
  const double best = fc < fd ? c : d;
  const double f_best = std::min(fc, fd);
  h[coord] = f_best < f_center ? best : center;
  return std::min(f_best, f_center);
}

}  // namespace

namespace {

// Allocation-free evaluation for the grid scan; tau <= 3.
double small_model_value(const CubicModel& model, const double* h, Index t) {
  double lin = 0.0, quad = 0.0, sq = 0.0;
  for (Index i = 0; i < t; ++i) {
    lin += model.g[i] * h[i];
    sq += h[i] * h[i];
    double row = 0.0;
    for (Index j = 0; j < t; ++j) row += model.q(i, j) * h[j];
    quad += h[i] * row;
  }
  const double r = std::sqrt(sq);
  return model.f_at_x + lin + 0.5 * quad + model.m / 6.0 * r * r * r;
}

}  // namespace

OracleResult brute_force_oracle(const CubicModel& model, double grid_radius, std::size_t grid_points) {
  const Index t = model.g.size();
  if (t < 1 || t > 3) throw std::invalid_argument("brute_force_oracle: tau must be in [1, 3]");
  if (grid_points < 100) throw std::invalid_argument("brute_force_oracle: need at least 100 grid points per axis");
  if (!(grid_radius > 0.0)) throw std::invalid_argument("brute_force_oracle: grid radius must be positive");

  const double spacing = 2.0 * grid_radius / static_cast<double>(grid_points - 1);
  auto coord = [&](std::size_t i) { return -grid_radius + spacing * static_cast<double>(i); };

  OracleResult best;
  best.h = Vector::Zero(t);
  best.value = model_value(model, best.h);
  Vector h(t);
  const std::size_t ny = t >= 2 ? grid_points : 1;
  const std::size_t nz = t >= 3 ? grid_points : 1;
  for (std::size_t i = 0; i < grid_points; ++i) {
    h[0] = coord(i);
    for (std::size_t j = 0; j < ny; ++j) {
      if (t >= 2) h[1] = coord(j);
      for (std::size_t k = 0; k < nz; ++k) {
        if (t >= 3) h[2] = coord(k);
        const double value = small_model_value(model, h.data(), t);
        if (value < best.value) {
          best.value = value;
          best.h = h;
        }
      }
    }
  }

  // Coordinate-descent polish: golden-section line minimizations whose
  // window halves once the moves become small relative to it.
  double width = spacing;
  h = best.h;
  double value = best.value;
  for (int sweep = 0; sweep < 5000 && width > 1e-13 * (1.0 + grid_radius); ++sweep) {
    double biggest_move = 0.0;
    for (Index c = 0; c < t; ++c) {
      const double before = h[c];
      value = golden_minimize(model, h, c, width);
      biggest_move = std::max(biggest_move, std::abs(h[c] - before));
    }
    if (biggest_move < 0.25 * width) width *= 0.5;
  }
  if (value < best.value) {
    best.value = value;
    best.h = h;
  }
  return best;
}

}  // namespace sscn
