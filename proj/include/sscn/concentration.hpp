#pragma once

#include "sscn/subset.hpp"

namespace sscn {

/// Monte-Carlo moments of the coordinate-sampling errors for uniform
/// tau-subsets: ||g - g_[S]||^2, ||H_[S] - H||_F^2 and ||g_[S]||^2.
struct ConcentrationEstimate {
  double mean_sq_grad_gap = 0.0;
  double mean_sq_hess_fro_gap = 0.0;
  double mean_sq_sampled_grad = 0.0;
  double sem_grad_gap = 0.0;  // standard errors of the means
  double sem_hess_gap = 0.0;
  double sem_sampled_grad = 0.0;
  /// Trials where ||H_[S] - H||_2 exceeded ||H_[S] - H||_F (should be 0).
  std::size_t spectral_exceeds_frobenius = 0;
};

/// Trials are drawn in fixed blocks, each with its own generator seeded from
/// one draw of `rng`, so the parallel and serial versions agree exactly.
/// Spectral-norm checks run only when `check_spectral` is set (O(n^3) each).
ConcentrationEstimate concentration_probe(const Vector& g, const Matrix& h, std::size_t tau, std::size_t trials,
                                          Rng& rng, bool check_spectral = false);

namespace serial {
ConcentrationEstimate concentration_probe(const Vector& g, const Matrix& h, std::size_t tau, std::size_t trials,
                                          Rng& rng, bool check_spectral = false);
}

/// (1 - tau/n) ||g||^2.
double exact_gradient_gap(const Vector& g, std::size_t tau);
/// p2 = tau (tau - 1) / (n (n - 1)), the chance two fixed distinct indices are both sampled.
double pair_inclusion_probability(std::size_t tau, std::size_t n);
/// Exact E||H_[S] - H||_F^2 = (1 - tau/n) sum_i H_ii^2 + (1 - p2) sum_{i != j} H_ij^2.
double exact_hessian_gap(const Matrix& h, std::size_t tau);
/// (1 - p2) ||H||_F^2, an upper bound on `exact_hessian_gap`.
double hessian_gap_bound(const Matrix& h, std::size_t tau);

}  // namespace sscn
