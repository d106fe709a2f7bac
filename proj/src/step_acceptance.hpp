#pragma once

#include "sscn/optimizer.hpp"

#include <cmath>
#include <limits>

namespace sscn::detail {

inline constexpr std::size_t kMaxMRetries = 60;

struct ChosenStep {
  SubproblemSolution solution;
  double change = 0.0;  // f(x + h) - f(x)
  double m = 0.0;
  std::size_t retries = 0;
  bool progress = true;
  bool accept = false;
};

/// f(x + h) <= m(h), compared as changes relative to f(x). The slack covers
/// roundoff in f itself.
inline bool progress_holds(double change, const CubicModel& model, const Vector& h) {
  if (!std::isfinite(change)) return false;
  const double lin = model.g.dot(h);
  const double quad = 0.5 * h.dot(model.q * h);
  const double r = h.norm();
  const double cubic = model.m / 6.0 * r * r * r;
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() * 
                       (std::abs(model.f_at_x) + std::abs(lin) + std::abs(quad) + cubic);
  return change <= lin + quad + cubic + slack;
}

/// Solves the model with model.m as the starting weight and raises M while the
/// progress condition fails (adaptive and theory policies). `change(h)`
/// returns f(x + h) - f(x).
template <class ChangeFn>
ChosenStep choose_step(CubicModel& model, const MPolicy& policy, double tol, ChangeFn&& change) {
  ChosenStep out;
  const bool can_grow = !std::holds_alternative<FixedM>(policy);
  const double grow = std::holds_alternative<AdaptiveDoublingM>(policy) ? std::get<AdaptiveDoublingM>(policy).grow : 2.0;
  for (;;) {
    out.solution = solve_global(model, tol);
    out.m = model.m;
    if (out.solution.r == 0.0) {
      out.change = 0.0;
      out.progress = true;
      out.accept = false;
      return out;
    }
    out.change = change(out.solution.h);
    if (progress_holds(out.change, model, out.solution.h)) {
      out.progress = true;
      out.accept = out.change <= 0.0;
      return out;
    }
    if (!can_grow || out.retries == kMaxMRetries) {
      out.progress = false;
      out.accept = std::isfinite(out.change) && out.change <= 0.0;
      return out;
    }
    model.m *= grow;
    ++out.retries;
  }
}

}  // namespace sscn::detail
