#pragma once

#include "sscn/optimizer.hpp"

namespace sscn {

/// Backtracking on f(x) - f(x + eta d) >= c * eta * ||g_S||^2 with d = -g_S
/// embedded on S.
struct ArmijoParams {
  double eta0 = 1.0;
  double backtrack = 0.5;
  double c = 0.5;
  std::size_t max_backtracks = 50;
};

struct CdConfig {
  SamplingSchedule schedule = ConstantSchedule{1};
  ArmijoParams armijo;
  StopCriteria stop;
  std::uint64_t seed = 0;
  std::size_t full_grad_every = 10;
  bool record_time = true;
  bool keep_iterates = false;
};

void validate(const CdConfig& config, std::size_t n);

struct CdStepReport {
  double f_before = 0.0;
  double f_after = 0.0;
  double grad_subset_norm = 0.0;
  double eta = 0.0;
  std::size_t backtracks = 0;
  bool exhausted = false;  // no admissible eta found; x unchanged
  bool noise_floor = false;  // admissible eta found but f(x + eta d) rounds above f(x); x unchanged
};

CdStepReport cd_step(PointState& point, const CoordinateSubset& s, const ArmijoParams& armijo);

/// Random subspace gradient descent with Armijo backtracking. Uses the same
/// subset sampler and RNG consumption as `run`, so equal seeds and schedules
/// give equal subsets. coord_cost per iteration is tau.
RunTrace cd_run(const Objective& obj, const Vector& x0, const CdConfig& config);

/// Cubic regularized Newton in the full space: `run` with tau = n and exact
/// curvature. Schedule and curvature in `config` are overridden.
RunTrace full_cubic_newton_run(const Objective& obj, const Vector& x0, const OptimizerConfig& config);

/// Independent dense implementation of the same method (full gradient and
/// Hessian oracles, no subset machinery), kept as a reference for checking
/// that SSCN with tau = n reproduces cubic Newton.
RunTrace reference_cubic_newton_run(const Objective& obj, const Vector& x0, const OptimizerConfig& config);

}  // namespace sscn
