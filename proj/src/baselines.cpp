#include "sscn/baselines.hpp"

#include "step_acceptance.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace sscn {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void validate(const CdConfig& config, std::size_t n) {
  validate(config.schedule, n);
  const auto& a = config.armijo;
  if (!(a.eta0 > 0.0) || !(a.backtrack > 0.0) || !(a.backtrack < 1.0) || !(a.c > 0.0) || !(a.c < 1.0))
    throw std::invalid_argument("armijo needs eta0 > 0 and backtrack, c in (0, 1)");
  if (config.full_grad_every == 0) throw std::invalid_argument("full_grad_every must be at least 1");
  if (!(config.stop.grad_tol >= 0.0)) throw std::invalid_argument("grad_tol must be non-negative");
  if (config.stop.max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
  if (!(config.stop.max_seconds > 0.0)) throw std::invalid_argument("max_seconds must be positive");
}

CdStepReport cd_step(PointState& point, const CoordinateSubset& s, const ArmijoParams& armijo) {
  CdStepReport rep;
  rep.f_before = point.value();
  if (!std::isfinite(rep.f_before)) throw ObjectiveDiverged("objective is not finite at the current iterate");
  const Vector g = point.gradient_subset(s);
  const double gg = g.squaredNorm();
  rep.grad_subset_norm = std::sqrt(gg);
  rep.f_after = rep.f_before;
  if (gg == 0.0) return rep;

  double eta = armijo.eta0;
  for (std::size_t b = 0; b <= armijo.max_backtracks; ++b) {
    const Vector h = -eta * g;
    const double change = point.value_change(s, h);
    if (std::isfinite(change) && -change >= armijo.c * eta * gg) {
      // At the roundoff floor the recomputed f can come out one ulp above
      // f(x); such a step is not taken.
      if (!(point.value_after(s, h) <= rep.f_before)) {
        rep.backtracks = b;
        rep.noise_floor = true;
        return rep;
      }
      point.apply(s, h);
      rep.eta = eta;
      rep.backtracks = b;
      rep.f_after = point.value();
      return rep;
    }
    eta *= armijo.backtrack;
  }
  rep.backtracks = armijo.max_backtracks;
  rep.exhausted = true;
  return rep;
}

RunTrace cd_run(const Objective& obj, const Vector& x0, const CdConfig& config) {
  const std::size_t n = obj.dimension();
  require_dimension(static_cast<std::size_t>(x0.size()), n, "x0");
  validate(config, n);

  RunTrace trace;
  trace.method = "cd";
  trace.settings = {{"schedule", describe(config.schedule)},
                    {"armijo", "eta0=" + num(config.armijo.eta0) + ",backtrack=" + num(config.armijo.backtrack) +
                                   ",c=" + num(config.armijo.c) +
                                   ",max_backtracks=" + std::to_string(config.armijo.max_backtracks)},
                    {"grad_tol", num(config.stop.grad_tol)},
                    {"max_iters", std::to_string(config.stop.max_iters)},
                    {"seed", std::to_string(config.seed)},
                    {"full_grad_every", std::to_string(config.full_grad_every)}};
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return config.record_time ? seconds_since(start) : 0.0; };

  auto point = obj.bind(x0);
  if (!std::isfinite(point->value())) throw ObjectiveDiverged("objective is not finite at x0");
  const double g0 = point->gradient().norm();
  if (g0 <= config.stop.grad_tol) {
    IterationRecord rec;
    rec.f_value = point->value();
    rec.full_grad_norm = g0;
    rec.elapsed_seconds = elapsed();
    trace.records.push_back(rec);
    if (config.keep_iterates) trace.iterates.push_back(point->x());
    trace.final_x = point->x();
    trace.termination = Termination::GradTol;
    return trace;
  }

  Rng rng(config.seed);
  ScheduleState sched;
  const auto* adaptive = std::get_if<AdaptiveSchedule>(&config.schedule);
  std::uint64_t cumulative = 0;
  trace.termination = Termination::MaxIters;

  for (std::size_t k = 0; k < config.stop.max_iters; ++k) {
    const std::size_t tau = next_tau(config.schedule, sched, n);
    const CoordinateSubset s = sample_uniform(n, tau, rng);
    const CdStepReport rep = cd_step(*point, s, config.armijo);
    const double step = rep.eta * rep.grad_subset_norm;
    if (adaptive != nullptr) sched = update_estimates(sched, rep.grad_subset_norm, 0.0, adaptive->ema_alpha);
    finish_iteration(sched, step);

    IterationRecord rec;
    rec.k = k;
    rec.tau = tau;
    rec.f_value = rep.f_after;
    rec.grad_subset_norm = rep.grad_subset_norm;
    rec.step_norm = step;
    rec.coord_cost = tau;
    cumulative += tau;
    rec.cumulative_coord_cost = cumulative;
    rec.m_retries = rep.backtracks;
    rec.elapsed_seconds = elapsed();

    const bool last = k + 1 == config.stop.max_iters;
    const bool out_of_time = seconds_since(start) >= config.stop.max_seconds;
    bool stop = false;
    if ((k + 1) % config.full_grad_every == 0 || last || out_of_time) {
      const double gn = point->gradient().norm();
      rec.full_grad_norm = gn;
      if (gn <= config.stop.grad_tol) {
        trace.termination = Termination::GradTol;
        stop = true;
      }
    }
    if (!stop && out_of_time) {
      trace.termination = Termination::MaxTime;
      stop = true;
    }
    trace.records.push_back(rec);
    if (config.keep_iterates) trace.iterates.push_back(point->x());
    if (stop) break;
  }
  trace.final_x = point->x();
  return trace;
}

RunTrace full_cubic_newton_run(const Objective& obj, const Vector& x0, const OptimizerConfig& config) {
  OptimizerConfig full = config;
  full.schedule = ConstantSchedule{obj.dimension()};
  full.curvature = ExactCurvature{};
  RunTrace trace = run(obj, x0, full);
  trace.method = "cr";
  return trace;
}

RunTrace reference_cubic_newton_run(const Objective& obj, const Vector& x0, const OptimizerConfig& config) {
  const std::size_t n = obj.dimension();
  require_dimension(static_cast<std::size_t>(x0.size()), n, "x0");
  OptimizerConfig checked = config;
  checked.schedule = ConstantSchedule{n};
  checked.curvature = ExactCurvature{};
  validate(checked, n);

  RunTrace trace;
  trace.method = "cr-reference";
  trace.settings = describe(checked);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return config.record_time ? seconds_since(start) : 0.0; };
  const CoordinateSubset full = CoordinateSubset::full(n);

  Vector x = x0;
  double f = obj.value(x);
  if (!std::isfinite(f)) throw ObjectiveDiverged("objective is not finite at x0");
  Vector g = obj.gradient(x);
  if (g.norm() <= config.stop.grad_tol) {
    IterationRecord rec;
    rec.f_value = f;
    rec.full_grad_norm = g.norm();
    rec.elapsed_seconds = elapsed();
    trace.records.push_back(rec);
    if (config.keep_iterates) trace.iterates.push_back(x);
    trace.final_x = x;
    trace.termination = Termination::GradTol;
    return trace;
  }

  MState m_state = initial_m_state(config.m_policy);
  const std::uint64_t cost = static_cast<std::uint64_t>(n) * n + n;
  std::uint64_t cumulative = 0;
  trace.termination = Termination::MaxIters;

  for (std::size_t k = 0; k < config.stop.max_iters; ++k) {
    const double gnorm = g.norm();
    IterationRecord rec;
    rec.k = k;
    rec.tau = n;
    rec.grad_subset_norm = gnorm;

    double m = m_state.current;
    bool skip = false;
    if (const auto* fm = std::get_if<FixedM>(&config.m_policy)) {
      m = fm->m;
    } else if (const auto* t = std::get_if<TheoryRuleM>(&config.m_policy)) {
      const auto mk = m_k_theory(t->sigma, t->l1, t->l2, gnorm);
      skip = !mk;
      if (mk) m = *mk;
    }
    if (!skip) {
      CubicModel model;
      model.f_at_x = f;
      model.g = g;
      model.q = obj.hessian(x);
      model.m = m;
      model.subset = full;
      auto chosen = detail::choose_step(model, config.m_policy, config.subproblem_tol,
                                        [&](const Vector& h) { return obj.value_change(x, full, h); });
      rec.m = chosen.m;
      rec.m_retries = chosen.retries;
      if (chosen.accept && !(obj.value(x + chosen.solution.h) <= f)) chosen.accept = false;
      if (chosen.accept) {
        x += chosen.solution.h;
        f = obj.value(x);
        if (!std::isfinite(f)) throw ObjectiveDiverged("objective is not finite after an accepted step");
        g = obj.gradient(x);
        rec.step_norm = chosen.solution.r;
      }
      if (const auto* a = std::get_if<AdaptiveDoublingM>(&config.m_policy)) {
        m_state.current = std::max(a->m_min, a->shrink * chosen.m);
      }
    }
    rec.f_value = f;
    rec.coord_cost = cost;
    cumulative += cost;
    rec.cumulative_coord_cost = cumulative;
    rec.elapsed_seconds = elapsed();

    const bool last = k + 1 == config.stop.max_iters;
    const bool out_of_time = seconds_since(start) >= config.stop.max_seconds;
    bool stop = false;
    if ((k + 1) % config.full_grad_every == 0 || last || out_of_time) {
      rec.full_grad_norm = g.norm();
      if (g.norm() <= config.stop.grad_tol) {
        trace.termination = Termination::GradTol;
        stop = true;
      }
    }
    if (!stop && out_of_time) {
      trace.termination = Termination::MaxTime;
      stop = true;
    }
    trace.records.push_back(rec);
    if (config.keep_iterates) trace.iterates.push_back(x);
    if (stop) break;
  }
  trace.final_x = x;
  return trace;
}

}  // namespace sscn
