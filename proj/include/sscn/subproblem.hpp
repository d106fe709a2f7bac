#pragma once

#include "sscn/cubic_model.hpp"

namespace sscn {

/// Global minimizer of a cubic model together with its optimality
/// certificates: stationarity g + Q h + alpha h = 0 with alpha = M r / 2, and
/// Q + alpha I positive semidefinite.
struct SubproblemSolution {
  Vector h;
  double r = 0.0;
  double alpha = 0.0;
  double stationarity_residual = 0.0;
  double min_shifted_eig = 0.0;
  bool hard_case = false;
};

/// Exact solve through the eigendecomposition Q = V diag(lambda) V^T and the
/// secular equation ||(diag(lambda) + alpha I)^{-1} V^T g|| = 2 alpha / M on
/// alpha > max(0, -lambda_min). In the hard case (g orthogonal to the
/// minimal eigenspace and no root above the bound) the minimizer gains a
/// component along the minimal eigenvector, oriented so its first nonzero
/// entry is positive. `tol` bounds the acceptable relative stationarity
/// residual; the solve itself runs to machine precision. O(tau^3).
SubproblemSolution solve_global(const CubicModel& model, double tol = 1e-5);

/// Independent cross-check: maximizes the concave dual
///   D(alpha) = -1/2 <(Q + alpha I)^{-1} g, g> - 2 alpha^3 / (3 M^2)
/// over alpha with Q + alpha I positive definite by bisection on the sign of
/// D', using only Cholesky factorizations. Sets `hard_case` when the maximizer
/// sits on the boundary of the feasible interval; callers then fall back to
/// `solve_global`.
SubproblemSolution solve_alpha_dual(const CubicModel& model, double tol = 1e-5);

/// The dual objective above; -infinity where Q + alpha I is not positive definite.
double dual_objective(const CubicModel& model, double alpha);

/// Minimizer when Q = 0: h = -sqrt(2 / (M ||g||)) g, and 0 for g = 0.
Vector closed_form_zero_curvature(const Vector& g, double m);

/// Every global minimizer satisfies ||h|| <= this bound (from m(h) <= m(0)).
double minimizer_norm_bound(const CubicModel& model);

struct OracleResult {
  Vector h;
  double value = 0.0;
};

/// Grid search over [-radius, radius]^tau followed by coordinate-descent
/// polishing. Verification only: tau <= 3 and at least 100 points per axis.
OracleResult brute_force_oracle(const CubicModel& model, double grid_radius, std::size_t grid_points);

}  // namespace sscn
