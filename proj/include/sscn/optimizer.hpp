#pragma once

#include "sscn/cubic_model.hpp"
#include "sscn/schedule.hpp"
#include "sscn/subproblem.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sscn {

struct FixedM {
  double m = 1.0;
};

/// Retry with M <- grow * M until f(x + h) <= m(h), then offer
/// max(m_min, shrink * M) to the next iteration.
struct AdaptiveDoublingM {
  double m0 = 1.0;
  double grow = 2.0;
  double shrink = 0.5;
  double m_min = 1e-6;
};

/// M_k = 2 L2 + 7^2 (sigma + L1)^2 / (2 ||g_S||). sigma is raised to the
/// curvature provider's own error bound when that is larger.
struct TheoryRuleM {
  double sigma = 0.0;
  double l1 = 1.0;
  double l2 = 1.0;
};

using MPolicy = std::variant<FixedM, AdaptiveDoublingM, TheoryRuleM>;

struct StopCriteria {
  double grad_tol = 1e-5;
  std::size_t max_iters = 1000;
  double max_seconds = std::numeric_limits<double>::infinity();
};

struct OptimizerConfig {
  MPolicy m_policy = AdaptiveDoublingM{};
  SamplingSchedule schedule = ConstantSchedule{1};
  CurvatureSpec curvature = ExactCurvature{};
  double subproblem_tol = 1e-5;
  StopCriteria stop;
  std::uint64_t seed = 0;
  std::size_t full_grad_every = 10;
  bool record_time = true;
  bool keep_iterates = false;
};

void validate(const OptimizerConfig& config, std::size_t n);

struct IterationRecord {
  std::size_t k = 0;
  std::size_t tau = 0;
  double f_value = 0.0;  // after the step
  double grad_subset_norm = 0.0;
  std::optional<double> full_grad_norm;  // after the step, at the diagnostic cadence
  double step_norm = 0.0;
  double m = 0.0;
  std::uint64_t coord_cost = 0;
  std::uint64_t cumulative_coord_cost = 0;
  double elapsed_seconds = 0.0;
  std::size_t m_retries = 0;
};

enum class Termination { GradTol, MaxIters, MaxTime };

const char* to_string(Termination t);

struct RunTrace {
  std::string method;
  std::map<std::string, std::string> settings;
  std::vector<IterationRecord> records;
  std::vector<Vector> iterates;  // x after each record, when requested
  Vector final_x;
  Termination termination = Termination::MaxIters;
};

/// The objective returned a non-finite value at an accepted point.
class ObjectiveDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Regularization weight carried between iterations by the adaptive policy.
struct MState {
  double current = 1.0;
};

MState initial_m_state(const MPolicy& policy);

struct StepReport {
  SubproblemSolution solution;
  double f_before = 0.0;
  double f_after = 0.0;
  double grad_subset_norm = 0.0;
  double curvature_norm = 0.0;  // spectral norm of the model's Q block
  double step_norm = 0.0;       // norm of the step actually applied
  double m = 0.0;
  std::size_t retries = 0;
  bool progress_condition = true;  // f(x + h) <= m(h) for the applied step
  bool moved = false;
};

/// One SSCN iteration on the bound point: builds the model on S, picks M by
/// the configured policy, solves the cubic subproblem exactly and updates
/// x|_S. Never increases f.
StepReport sscn_step(const Objective& obj, PointState& point, const CoordinateSubset& s, const OptimizerConfig& config,
                     MState& m_state, LazyCache* lazy_cache = nullptr);

/// Value form: returns x_next and the record of the step.
std::pair<Vector, IterationRecord> sscn_step(const Objective& obj, const Vector& x, const CoordinateSubset& s,
                                             const OptimizerConfig& config, MState& m_state);

/// 2 L2 + 49 (sigma + L1)^2 / (2 ||g_S||); empty when ||g_S|| = 0, where the
/// method does not move.
std::optional<double> m_k_theory(double sigma, double l1, double l2, double g_subset_norm);

/// Runs SSCN from x0 until a stop criterion fires. Deterministic given the
/// seed, the configuration and the objective.
RunTrace run(const Objective& obj, const Vector& x0, const OptimizerConfig& config);

/// max{||grad f||^{3/2}, [-lambda_min(hess f)]^3}; dense diagnostic, n <= 2000.
double criticality_mu(const Objective& obj, const Vector& x);

std::map<std::string, std::string> describe(const OptimizerConfig& config);
std::string describe(const SamplingSchedule& schedule);

}  // namespace sscn
