#include "sscn/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sscn {
namespace {

std::size_t clip(double v, std::size_t lo, std::size_t hi) {
  if (!(v < static_cast<double>(hi))) return hi;  // also catches inf and NaN
  if (v < static_cast<double>(lo)) return lo;
  return static_cast<std::size_t>(v);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

void validate(const SamplingSchedule& schedule, std::size_t n) {
  std::visit(overloaded{
                 [&](const ConstantSchedule& s) {
                   if (s.tau < 1 || s.tau > n) throw std::invalid_argument("constant schedule: tau outside [1, n]");
                 },
                 [](const ExponentialSchedule& s) {
                   if (!(s.tau0 >= 1.0) || !(s.c_e >= 0.0) || !(s.d >= 0.0)) {
                     throw std::invalid_argument("exponential schedule: need tau0 >= 1, c_e >= 0, d >= 0");
                   }
                 },
                 [&](const AdaptiveSchedule& s) {
                   if (!(s.ema_alpha > 0.0 && s.ema_alpha <= 1.0) || !(s.smooth_beta > 0.0 && s.smooth_beta <= 1.0)) {
                     throw std::invalid_argument("adaptive schedule: ema_alpha and smooth_beta must lie in (0, 1]");
                   }
                   if (!(s.c > 0.0)) throw std::invalid_argument("adaptive schedule: c must be positive");
                   if (s.tau_min < 1 || s.tau_min > n) throw std::invalid_argument("adaptive schedule: tau_min outside [1, n]");
                 },
             },
             schedule);
}

std::size_t adaptive_bootstrap_tau(std::size_t n, std::size_t tau_min) {
  const double five_percent = std::ceil(0.05 * static_cast<double>(n));
  return clip(std::max(five_percent, 1.0), std::max<std::size_t>(tau_min, 1), n);
}

std::size_t adaptive_tau(double grad_norm_est, double hess_norm_est, double eps1, double eps2, std::size_t n) {
  double grad_branch = 0.0;
  if (grad_norm_est > 0.0) grad_branch = std::max(0.0, 1.0 - (eps1 * eps1) / (grad_norm_est * grad_norm_est));
  double hess_branch = 0.0;
  if (hess_norm_est > 0.0) hess_branch = std::sqrt(std::max(0.0, 1.0 - eps2 / (hess_norm_est * hess_norm_est)));
  const double fraction = std::max(grad_branch, hess_branch);
  // Absorb roundoff so that e.g. n * 0.99 with n = 100 gives 99, not 100.
  return clip(std::ceil(static_cast<double>(n) * fraction - 1e-9), 1, n);
}

std::size_t next_tau(const SamplingSchedule& schedule, ScheduleState& state, std::size_t n) {
  return std::visit(
      overloaded{
          [&](const ConstantSchedule& s) { return clip(static_cast<double>(s.tau), 1, n); },
          [&](const ExponentialSchedule& s) {
            const double raw = s.tau0 + s.c_e * std::exp(s.d * static_cast<double>(state.k));
            return clip(std::round(raw), 1, n);
          },
          [&](const AdaptiveSchedule& s) {
            const std::size_t lo = std::max<std::size_t>(s.tau_min, 1);
            if (state.k == 0 || !state.has_estimates) {
              const std::size_t tau = adaptive_bootstrap_tau(n, lo);
              state.prev_tau_smoothed = static_cast<double>(tau);
              return tau;
            }
            const double eps = s.c * state.prev_step_norm * state.prev_step_norm;
            const auto proposed =
                static_cast<double>(adaptive_tau(state.grad_norm_est, state.hess_norm_est, eps, eps, n));
            state.prev_tau_smoothed = s.smooth_beta * proposed + (1.0 - s.smooth_beta) * state.prev_tau_smoothed;
            return clip(std::round(state.prev_tau_smoothed), lo, n);
          },
      },
      schedule);
}

ScheduleState update_estimates(ScheduleState state, double grad_subset_norm, double hess_block_norm, double ema_alpha) {
  if (!state.has_estimates) {
    state.grad_norm_est = grad_subset_norm;
    state.hess_norm_est = hess_block_norm;
    state.has_estimates = true;
    return state;
  }
  state.grad_norm_est = ema_alpha * grad_subset_norm + (1.0 - ema_alpha) * state.grad_norm_est;
  state.hess_norm_est = ema_alpha * hess_block_norm + (1.0 - ema_alpha) * state.hess_norm_est;
  return state;
}

void finish_iteration(ScheduleState& state, double step_norm) {
  state.prev_step_norm = step_norm;
  ++state.k;
}

}  // namespace sscn
