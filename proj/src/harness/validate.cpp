#include "sscn/harness/validate.hpp"

#include "sscn/concentration.hpp"
#include "sscn/logistic.hpp"
#include "sscn/optimizer.hpp"
#include "sscn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace sscn::harness {

namespace {

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

Matrix random_symmetric(Rng& rng, Index t, double scale) {
  Matrix q(t, t);
  for (Index i = 0; i < t; ++i)
    for (Index j = 0; j <= i; ++j) q(i, j) = q(j, i) = scale * standard_normal(rng);
  return q;
}

Vector random_vector(Rng& rng, Index t, double scale) {
  Vector v(t);
  for (Index i = 0; i < t; ++i) v[i] = scale * standard_normal(rng);
  return v;
}

void subproblem_suite(SuiteReport& rep) {
  Rng rng(20240601);
  double worst_gap = -1e300, worst_res = 0.0, worst_cert = 1e300;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    const Index t = static_cast<Index>(1 + i % 3);
    const double m = 0.1 + 9.9 * uniform_unit(rng);
    const CubicModel model = make_model(0.0, random_vector(rng, t, 1.0), random_symmetric(rng, t, 1.0), m);
    const auto sol = solve_global(model);
    const double radius = 1.05 * minimizer_norm_bound(model) + 1e-9;
    const std::size_t points = t == 1 ? 4001 : (t == 2 ? 401 : 101);
    const auto oracle = brute_force_oracle(model, radius, points);
    const double gap = model_value(model, sol.h) - oracle.value;
    const double res_limit = 1e-5 * std::max(1.0, model.g.norm());
    worst_gap = std::max(worst_gap, gap);
    worst_res = std::max(worst_res, sol.stationarity_residual / res_limit);
    worst_cert = std::min(worst_cert, sol.min_shifted_eig);
    if (gap > 1e-6 || sol.stationarity_residual > res_limit || sol.min_shifted_eig < -1e-8) ++bad;
  }
  rep.checks.push_back({"oracle equivalence on 200 random models", bad == 0,
                        fmt("worst value gap %.3g, worst residual/limit %.3g", worst_gap, worst_res) +
                            fmt(", min certificate eigenvalue %.3g", worst_cert)});

  {
    const CubicModel model = make_model(0.0, Vector::Zero(1), Matrix::Constant(1, 1, -1.0), 2.0);
    const auto sol = solve_global(model);
    const double v = model_value(model, sol.h);
    const bool ok = std::abs(sol.r - 1.0) <= 1e-12 && std::abs(v + 1.0 / 6.0) <= 1e-10;
    rep.checks.push_back({"hard case g = 0, Q = -1, M = 2", ok, fmt("r = %.17g, m(h) = %.17g", sol.r, v)});
  }

  {
    double worst = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
      const Index t = static_cast<Index>(1 + uniform_below(rng, 8));
      const Vector g = random_vector(rng, t, 1.0);
      const double m = 0.1 + 9.9 * uniform_unit(rng);
      const auto sol = solve_global(make_model(0.0, g, Matrix::Zero(t, t), m));
      worst = std::max(worst, (sol.h - closed_form_zero_curvature(g, m)).norm());
    }
    rep.checks.push_back({"zero curvature closed form", worst <= 1e-10, fmt("max deviation %.3g", worst)});
  }

  {
    double worst = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      const Index t = static_cast<Index>(1 + uniform_below(rng, 6));
      const CubicModel model =
          make_model(0.0, random_vector(rng, t, 1.0), random_symmetric(rng, t, 1.0), 0.1 + 9.9 * uniform_unit(rng));
      const auto dual = solve_alpha_dual(model);
      if (dual.hard_case) continue;
      ++used;
      const auto primal = solve_global(model);
      worst = std::max(worst, std::abs(model_value(model, dual.h) - model_value(model, primal.h)));
    }
    rep.checks.push_back({"dual bisection agrees with eigen solve", worst <= 1e-8 && used > 50,
                          fmt("max value difference %.3g over %.0f instances", worst, static_cast<double>(used))});
  }
}

void concentration_suite(SuiteReport& rep) {
  {
    const std::size_t n = 4, tau = 2;
    const Vector g = Vector::Ones(4);
    double sum = 0.0, hsum = 0.0;
    std::size_t count = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const CoordinateSubset s({a, b}, n);
        const Vector gs = embed_vector(restrict_vector(g, s), s, n);
        sum += (g - gs).squaredNorm();
        const Matrix hi = Matrix::Identity(4, 4);
        const Matrix hs = embed_vector(Vector::Ones(2), s, n).asDiagonal();
        hsum += (hi - hs).squaredNorm();
        ++count;
      }
    }
    const double mean = sum / static_cast<double>(count);
    const double hmean = hsum / static_cast<double>(count);
    rep.checks.push_back({"all-ones gradient gap, n = 4, tau = 2", mean == 2.0 && exact_gradient_gap(g, tau) == 2.0,
                          fmt("enumeration %.17g, identity %.17g", mean, exact_gradient_gap(g, tau))});
    const double exact_h = exact_hessian_gap(Matrix::Identity(4, 4), tau);
    rep.checks.push_back({"identity Hessian gap, n = 4, tau = 2", std::abs(hmean - exact_h) <= 1e-15,
                          fmt("enumeration %.17g, identity %.17g", hmean, exact_h)});
  }

  Rng rng(7);
  const std::size_t n = 50;
  const Vector g = random_vector(rng, static_cast<Index>(n), 1.0);
  const Matrix h = random_symmetric(rng, static_cast<Index>(n), 1.0);
  for (const std::size_t tau : {std::size_t{1}, std::size_t{5}, std::size_t{25}, std::size_t{50}}) {
    const auto est = concentration_probe(g, h, tau, 20000, rng, tau == 5);
    const double eg = exact_gradient_gap(g, tau);
    const double eh = exact_hessian_gap(h, tau);
    const bool ok_g = std::abs(est.mean_sq_grad_gap - eg) <= 4.0 * est.sem_grad_gap + 1e-12 * (1.0 + eg);
    const bool ok_h = std::abs(est.mean_sq_hess_fro_gap - eh) <= 4.0 * est.sem_hess_gap + 1e-12 * (1.0 + eh);
    const std::string t = " (tau = " + std::to_string(tau) + ")";
    rep.checks.push_back({"gradient gap identity" + t, ok_g, fmt("monte carlo %.6g, exact %.6g", est.mean_sq_grad_gap, eg)});
    rep.checks.push_back(
        {"Hessian gap identity" + t, ok_h, fmt("monte carlo %.6g, exact %.6g", est.mean_sq_hess_fro_gap, eh)});
    if (tau == 5) {
      rep.checks.push_back({"spectral gap below Frobenius gap", est.spectral_exceeds_frobenius == 0,
                            fmt("%.0f violations", static_cast<double>(est.spectral_exceeds_frobenius))});
    }
  }
}

void gradcheck_suite(SuiteReport& rep) {
  Rng rng(11);
  const auto data = make_synthetic_classification(50, 200, 3);
  const RegularizedLogistic logistic(data, 0.1);
  double worst_g = 0.0, worst_h = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    const Vector x = random_vector(rng, 50, 1.0);
    const CoordinateSubset s = i % 2 == 0 ? sample_uniform(50, 10, rng) : CoordinateSubset::full(50);
    const auto r = finite_diff_check(logistic, x, s, 1e-4 * (1.0 + x.lpNorm<Eigen::Infinity>()));
    worst_g = std::max(worst_g, r.grad_relative());
    worst_h = std::max(worst_h, r.hess_relative());
  }
  rep.checks.push_back({"logistic gradient", worst_g <= 1e-6, fmt("max relative error %.3g", worst_g)});
  rep.checks.push_back({"logistic Hessian block", worst_h <= 1e-4, fmt("max relative error %.3g", worst_h)});

  const SaddleQuartic saddle(10, 0.25);
  double sg = 0.0, sh = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const Vector x = random_vector(rng, 10, 1.0);
    const auto r = finite_diff_check(saddle, x, sample_uniform(10, 4, rng), 1e-4 * (1.0 + x.lpNorm<Eigen::Infinity>()));
    sg = std::max(sg, r.grad_relative());
    sh = std::max(sh, r.hess_relative());
  }
  rep.checks.push_back({"saddle quartic oracles", sg <= 1e-6 && sh <= 1e-4, fmt("gradient %.3g, Hessian %.3g", sg, sh)});

  {
    const Vector x = random_vector(rng, 50, 1.0);
    auto point = logistic.bind(x);
    const CoordinateSubset s = sample_uniform(50, 7, rng);
    const double diff = std::max((point->gradient() - logistic.gradient(x)).cwiseAbs().maxCoeff(),
                                 (point->hessian_block(s) - logistic.hessian_block(x, s)).cwiseAbs().maxCoeff());
    rep.checks.push_back({"cached point agrees with direct oracles", diff <= 1e-12, fmt("max difference %.3g", diff)});
  }
}

void decrease_suite(SuiteReport& rep) {
  const auto data = make_synthetic_classification(50, 200, 3);
  const RegularizedLogistic logistic(data, 0.1);
  Rng lrng(5);
  const Vector x0 = Vector::Zero(50);
  const double m = estimate_hessian_lipschitz(logistic, x0, 1.0, 64, lrng);

  auto check = [&](const Objective& obj, const Vector& start, double mm, std::size_t tau, const std::string& label) {
    OptimizerConfig cfg;
    cfg.m_policy = FixedM{mm};
    cfg.curvature = ExactCurvature{};
    auto point = obj.bind(start);
    MState state = initial_m_state(cfg.m_policy);
    Rng rng(17);
    double worst = 1e300;
    std::size_t rejected = 0;
    for (std::size_t k = 0; k < 200; ++k) {
      const CoordinateSubset s = sample_uniform(obj.dimension(), tau, rng);
      const auto r = sscn_step(obj, *point, s, cfg, state);
      if (!r.progress_condition) ++rejected;
      const double margin = (r.f_before - r.f_after) - mm / 12.0 * std::pow(r.solution.r, 3);
      worst = std::min(worst, margin);
    }
    rep.checks.push_back({label, worst >= -1e-12,
                          fmt("min decrease margin %.3g, M = %.4g", worst, mm) +
                              fmt(", progress condition missed on %.0f steps", static_cast<double>(rejected))});
  };
  check(logistic, x0, m, 10, "logistic decrease (tau = 10)");
  check(logistic, x0, m, 50, "logistic decrease (tau = n)");

  const SaddleQuartic saddle(10, 0.25);
  const Vector s0 = Vector::Constant(10, 1e-3);
  Rng srng(6);
  const double ms = estimate_hessian_lipschitz(saddle, Vector::Zero(10), 3.0, 64, srng);
  check(saddle, s0, ms, 3, "saddle quartic decrease (tau = 3)");
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"subproblem", "concentration", "gradcheck", "lemma1"};
  return names;
}

std::optional<SuiteReport> run_suite(std::string_view name) {
  SuiteReport rep;
  rep.suite = std::string(name);
  if (name == "subproblem") {
    subproblem_suite(rep);
  } else if (name == "concentration") {
    concentration_suite(rep);
  } else if (name == "gradcheck") {
    gradcheck_suite(rep);
  } else if (name == "lemma1") {
    decrease_suite(rep);
  } else {
    return std::nullopt;
  }
  return rep;
}

void write_report(std::ostream& out, const SuiteReport& report) {
  std::size_t passed = 0;
  for (const auto& c : report.checks) {
    out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    passed += c.pass ? 1 : 0;
  }
  out << "suite " << report.suite << ": " << passed << '/' << report.checks.size() << " checks passed\n";
}

}  // namespace sscn::harness
