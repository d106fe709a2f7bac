#include "sscn/optimizer.hpp"

#include "step_acceptance.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace sscn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void validate_policy(const MPolicy& policy) {
  std::visit(overloaded{
                 [](const FixedM& p) {
                   if (!(p.m > 0.0) || !std::isfinite(p.m)) throw std::invalid_argument("fixed M must be positive");
                 },
                 [](const AdaptiveDoublingM& p) {
                   if (!(p.m0 > 0.0) || !(p.grow > 1.0) || !(p.shrink > 0.0) || p.shrink > 1.0 || !(p.m_min > 0.0))
                     throw std::invalid_argument("adaptive M needs m0 > 0, grow > 1, 0 < shrink <= 1, m_min > 0");
                 },
                 [](const TheoryRuleM& p) {
                   if (p.sigma < 0.0 || p.l1 < 0.0 || !(p.l2 > 0.0))
                     throw std::invalid_argument("theory rule needs sigma >= 0, L1 >= 0, L2 > 0");
                 },
             },
             policy);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::GradTol:
      return "grad_tol";
    case Termination::MaxIters:
      return "max_iters";
    case Termination::MaxTime:
      return "max_time";
  }
  return "unknown";
}

void validate(const OptimizerConfig& config, std::size_t n) {
  validate_policy(config.m_policy);
  validate(config.schedule, n);
  validate(config.curvature);
  if (!(config.subproblem_tol > 0.0)) throw std::invalid_argument("subproblem tolerance must be positive");
  if (config.full_grad_every == 0) throw std::invalid_argument("full_grad_every must be at least 1");
  if (!(config.stop.grad_tol >= 0.0)) throw std::invalid_argument("grad_tol must be non-negative");
  if (config.stop.max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
  if (!(config.stop.max_seconds > 0.0)) throw std::invalid_argument("max_seconds must be positive");
}

MState initial_m_state(const MPolicy& policy) {
  MState s;
  if (const auto* a = std::get_if<AdaptiveDoublingM>(&policy)) s.current = a->m0;
  if (const auto* f = std::get_if<FixedM>(&policy)) s.current = f->m;
  return s;
}

std::optional<double> m_k_theory(double sigma, double l1, double l2, double g_subset_norm) {
  if (!(g_subset_norm > 0.0)) return std::nullopt;
  const double s = sigma + l1;
  return 2.0 * l2 + 49.0 * s * s / (2.0 * g_subset_norm);
}

StepReport sscn_step(const Objective& obj, PointState& point, const CoordinateSubset& s, const OptimizerConfig& config,
                     MState& m_state, LazyCache* lazy_cache) {
  StepReport rep;
  rep.f_before = point.value();
  if (!std::isfinite(rep.f_before)) throw ObjectiveDiverged("objective is not finite at the current iterate");

  if (const auto* lazy = std::get_if<LazyCurvature>(&config.curvature)) {
    if (lazy_cache == nullptr) throw std::invalid_argument("lazy curvature requires a cache");
    lazy_cache->prepare(obj, point, *lazy);
  }
  CubicModel model = build_model(point, s, config.curvature, 1.0, lazy_cache, obj.lipschitz());
  rep.grad_subset_norm = model.g.norm();
  if (std::holds_alternative<AdaptiveSchedule>(config.schedule)) rep.curvature_norm = spectral_norm_symmetric(model.q);

  double m = m_state.current;
  if (const auto* f = std::get_if<FixedM>(&config.m_policy)) {
    m = f->m;
  } else if (const auto* t = std::get_if<TheoryRuleM>(&config.m_policy)) {
    const double sigma = std::max(t->sigma, model.sigma_bound.value_or(0.0));
    const auto mk = m_k_theory(sigma, t->l1, t->l2, rep.grad_subset_norm);
    if (!mk) {
      rep.f_after = rep.f_before;
      rep.solution.h = Vector::Zero(static_cast<Index>(s.size()));
      return rep;
    }
    m = *mk;
  }
  model.m = m;

  auto chosen = detail::choose_step(model, config.m_policy, config.subproblem_tol,
                                    [&](const Vector& h) { return point.value_change(s, h); });
  rep.solution = std::move(chosen.solution);
  rep.m = chosen.m;
  rep.retries = chosen.retries;
  rep.progress_condition = chosen.progress;
  // the change oracle is more accurate than f itself; keep the recorded
  // values monotone when the two disagree in the last bits
  if (chosen.accept && !(point.value_after(s, rep.solution.h) <= rep.f_before)) chosen.accept = false;
  if (chosen.accept) {
    point.apply(s, rep.solution.h);
    if (lazy_cache != nullptr && lazy_cache->has_anchor()) lazy_cache->note_step(s, rep.solution.h);
    rep.moved = true;
    rep.step_norm = rep.solution.r;
    rep.f_after = point.value();
    if (!std::isfinite(rep.f_after)) throw ObjectiveDiverged("objective is not finite after an accepted step");
  } else {
    rep.f_after = rep.f_before;
  }
  if (const auto* a = std::get_if<AdaptiveDoublingM>(&config.m_policy)) {
    m_state.current = std::max(a->m_min, a->shrink * rep.m);
  }
  return rep;
}

std::pair<Vector, IterationRecord> sscn_step(const Objective& obj, const Vector& x, const CoordinateSubset& s,
                                             const OptimizerConfig& config, MState& m_state) {
  auto point = obj.bind(x);
  LazyCache cache;
  const StepReport rep = sscn_step(obj, *point, s, config, m_state, &cache);
  IterationRecord rec;
  rec.tau = s.size();
  rec.f_value = rep.f_after;
  rec.grad_subset_norm = rep.grad_subset_norm;
  rec.step_norm = rep.step_norm;
  rec.m = rep.m;
  rec.coord_cost = static_cast<std::uint64_t>(rec.tau) * rec.tau + rec.tau;
  rec.cumulative_coord_cost = rec.coord_cost;
  rec.m_retries = rep.retries;
  return {point->x(), rec};
}

RunTrace run(const Objective& obj, const Vector& x0, const OptimizerConfig& config) {
  const std::size_t n = obj.dimension();
  require_dimension(static_cast<std::size_t>(x0.size()), n, "x0");
  validate(config, n);

  RunTrace trace;
  trace.method = "sscn";
  trace.settings = describe(config);
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
  MState m_state = initial_m_state(config.m_policy);
  LazyCache cache;
  const auto* adaptive = std::get_if<AdaptiveSchedule>(&config.schedule);
  std::uint64_t cumulative = 0;
  trace.termination = Termination::MaxIters;

  for (std::size_t k = 0; k < config.stop.max_iters; ++k) {
    const std::size_t tau = next_tau(config.schedule, sched, n);
    const CoordinateSubset s = sample_uniform(n, tau, rng);
    const StepReport rep = sscn_step(obj, *point, s, config, m_state, &cache);
    if (adaptive != nullptr) sched = update_estimates(sched, rep.grad_subset_norm, rep.curvature_norm, adaptive->ema_alpha);
    finish_iteration(sched, rep.solution.r);

    IterationRecord rec;
    rec.k = k;
    rec.tau = tau;
    rec.f_value = rep.f_after;
    rec.grad_subset_norm = rep.grad_subset_norm;
    rec.step_norm = rep.step_norm;
    rec.m = rep.m;
    rec.coord_cost = static_cast<std::uint64_t>(tau) * tau + tau;
    cumulative += rec.coord_cost;
    rec.cumulative_coord_cost = cumulative;
    rec.m_retries = rep.retries;
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

double criticality_mu(const Objective& obj, const Vector& x) {
  if (obj.dimension() > 2000) throw std::invalid_argument("criticality_mu needs a dense Hessian; n must be <= 2000");
  const double g = obj.gradient(x).norm();
  const double lmin = min_eigenvalue_symmetric(obj.hessian(x));
  const double neg = std::max(0.0, -lmin);
  return std::max(std::pow(g, 1.5), neg * neg * neg);
}

std::string describe(const SamplingSchedule& schedule) {
  return std::visit(overloaded{
                        [](const ConstantSchedule& c) { return "constant(tau=" + std::to_string(c.tau) + ")"; },
                        [](const ExponentialSchedule& e) {
                          return "exponential(tau0=" + num(e.tau0) + ",c_e=" + num(e.c_e) + ",d=" + num(e.d) + ")";
                        },
                        [](const AdaptiveSchedule& a) {
                          return "adaptive(c=" + num(a.c) + ",ema_alpha=" + num(a.ema_alpha) +
                                 ",smooth_beta=" + num(a.smooth_beta) + ",tau_min=" + std::to_string(a.tau_min) + ")";
                        },
                    },
                    schedule);
}

std::map<std::string, std::string> describe(const OptimizerConfig& config) {
  std::map<std::string, std::string> out;
  out["m_policy"] = std::visit(overloaded{
                                   [](const FixedM& p) { return "fixed(M=" + num(p.m) + ")"; },
                                   [](const AdaptiveDoublingM& p) {
                                     return "adaptive(M0=" + num(p.m0) + ",grow=" + num(p.grow) +
                                            ",shrink=" + num(p.shrink) + ",M_min=" + num(p.m_min) + ")";
                                   },
                                   [](const TheoryRuleM& p) {
                                     return "theory(sigma=" + num(p.sigma) + ",L1=" + num(p.l1) + ",L2=" + num(p.l2) + ")";
                                   },
                               },
                               config.m_policy);
  out["schedule"] = describe(config.schedule);
  out["curvature"] = std::visit(overloaded{
                                    [](const ExactCurvature&) { return std::string("exact"); },
                                    [](const ZeroCurvature&) { return std::string("zero"); },
                                    [](const LazyCurvature& l) {
                                      return "lazy(period=" + std::to_string(l.period) + ",radius=" + num(l.radius) + ")";
                                    },
                                    [](const FiniteDifferenceCurvature& f) {
                                      return f.delta ? "fd(delta=" + num(*f.delta) + ")" : std::string("fd(auto)");
                                    },
                                },
                                config.curvature);
  out["subproblem_tol"] = num(config.subproblem_tol);
  out["grad_tol"] = num(config.stop.grad_tol);
  out["max_iters"] = std::to_string(config.stop.max_iters);
  out["seed"] = std::to_string(config.seed);
  out["full_grad_every"] = std::to_string(config.full_grad_every);
  return out;
}

}  // namespace sscn
