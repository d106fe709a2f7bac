#pragma once

#include <cstddef>
#include <variant>

namespace sscn {

struct ConstantSchedule {
  std::size_t tau = 1;
};

/// tau_k = tau0 + c_e * exp(d * k), rounded to nearest.
struct ExponentialSchedule {
  double tau0 = 1.0;
  double c_e = 1.0;
  double d = 0.0;
};

/// Sizes chosen from gradient/Hessian-norm estimates with
/// eps1 = eps2 = c * ||h_{k-1}||^2, then smoothed by an EMA with weight beta.
struct AdaptiveSchedule {
  double c = 1.0;
  double ema_alpha = 0.2;
  double smooth_beta = 0.5;
  std::size_t tau_min = 1;
};

using SamplingSchedule = std::variant<ConstantSchedule, ExponentialSchedule, AdaptiveSchedule>;

void validate(const SamplingSchedule& schedule, std::size_t n);

struct ScheduleState {
  std::size_t k = 0;
  bool has_estimates = false;
  double grad_norm_est = 0.0;
  double hess_norm_est = 0.0;
  double prev_step_norm = 0.0;
  double prev_tau_smoothed = 0.0;
};

/// Size for iteration `state.k`, clipped to [1, n]. For the adaptive
/// schedule this also commits the smoothed size into the state.
std::size_t next_tau(const SamplingSchedule& schedule, ScheduleState& state, std::size_t n);

/// ceil(n * max{1 - eps1^2/G^2, sqrt(1 - eps2/H^2)}) clipped to [1, n]; a
/// branch with a zero estimate or a negative radicand contributes 0.
std::size_t adaptive_tau(double grad_norm_est, double hess_norm_est, double eps1, double eps2, std::size_t n);

/// EMA update of both trackers; the first observation initializes them.
ScheduleState update_estimates(ScheduleState state, double grad_subset_norm, double hess_block_norm, double ema_alpha);

/// Records the step just taken and advances k.
void finish_iteration(ScheduleState& state, double step_norm);

/// Size used for the first adaptive iteration, before any step exists.
std::size_t adaptive_bootstrap_tau(std::size_t n, std::size_t tau_min);

}  // namespace sscn
