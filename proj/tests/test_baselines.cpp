#include "sscn/baselines.hpp"
#include "sscn/logistic.hpp"
#include "sscn/synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace sscn;

namespace {

Matrix spd(Rng& rng, Index n, double shift) {
  Matrix b(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) b(i, j) = standard_normal(rng);
  return b * b.transpose() / static_cast<double>(n) + shift * Matrix::Identity(n, n);
}

Vector gaussian(Rng& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = standard_normal(rng);
  return v;
}

double max_iterate_gap(const RunTrace& a, const RunTrace& b) {
  double gap = 0.0;
  for (std::size_t k = 0; k < std::min(a.iterates.size(), b.iterates.size()); ++k) {
    gap = std::max(gap, (a.iterates[k] - b.iterates[k]).cwiseAbs().maxCoeff());
  }
  return gap;
}

}  // namespace

TEST_CASE("armijo accepts the unit step on a unit quadratic") {
  const Quadratic q(Matrix::Identity(1, 1), Vector::Zero(1));
  auto p = q.bind(Vector::Ones(1));
  const auto rep = cd_step(*p, CoordinateSubset::full(1), ArmijoParams{});
  CHECK(rep.eta == 1.0);
  CHECK(rep.backtracks == 0);
  CHECK(p->x()[0] == 0.0);
  CHECK(rep.f_before - rep.f_after >= 0.5 * rep.eta * 1.0);
}

TEST_CASE("armijo with zero subset gradient does nothing") {
  const Quadratic q(Matrix::Identity(2, 2), (Vector(2) << 0.0, 1.0).finished());
  auto p = q.bind(Vector::Zero(2));
  const auto rep = cd_step(*p, CoordinateSubset({0}, 2), ArmijoParams{});
  CHECK(rep.backtracks == 0);
  CHECK(rep.eta == 0.0);
  CHECK(p->x() == Vector::Zero(2));
}

TEST_CASE("armijo backtracks on a stiff quadratic") {
  const Quadratic q(100.0 * Matrix::Identity(1, 1), Vector::Zero(1));
  auto p = q.bind(Vector::Ones(1));
  const auto rep = cd_step(*p, CoordinateSubset::full(1), ArmijoParams{});
  CHECK(rep.backtracks >= 1);
  CHECK_FALSE(rep.exhausted);
  CHECK(rep.f_before - rep.f_after >= 0.5 * rep.eta * rep.grad_subset_norm * rep.grad_subset_norm);
}

TEST_CASE("armijo exhaustion leaves x alone") {
  const Quadratic q(1e6 * Matrix::Identity(1, 1), Vector::Zero(1));
  auto p = q.bind(Vector::Ones(1));
  const auto rep = cd_step(*p, CoordinateSubset::full(1), ArmijoParams{1.0, 0.5, 0.5, 3});
  CHECK(rep.exhausted);
  CHECK(rep.eta == 0.0);
  CHECK(p->x()[0] == 1.0);
}

TEST_CASE("armijo certificate holds on every CD step") {
  const RegularizedLogistic f(make_synthetic_classification(25, 120, 3), 0.1);
  Rng rng(1);
  auto p = f.bind(Vector::Zero(25));
  for (int i = 0; i < 200; ++i) {
    const auto s = sample_uniform(25, 1 + i % 6, rng);
    const Vector before = p->x();
    const auto rep = cd_step(*p, s, ArmijoParams{});
    if (rep.exhausted || rep.eta == 0.0) continue;
    CHECK(-f.value_change(before, s, -rep.eta * f.gradient_subset(before, s)) >=
          0.5 * rep.eta * rep.grad_subset_norm * rep.grad_subset_norm);
    CHECK(rep.f_after <= rep.f_before);
    for (Index j = 0; j < 25; ++j) {
      if (!s.contains(static_cast<std::size_t>(j))) CHECK(p->x()[j] == before[j]);
    }
  }
}

TEST_CASE("CD on a convex quadratic with tau = n") {
  // Minimum value 0, so f resolves decreases all the way down to the tolerance.
  Rng rng(2);
  const Quadratic q(spd(rng, 12, 0.5), Vector::Zero(12));
  CdConfig c;
  c.schedule = ConstantSchedule{12};
  c.stop.grad_tol = 1e-8;
  c.stop.max_iters = 20000;
  c.full_grad_every = 1;
  const Vector x0 = gaussian(rng, 12);
  const auto t = cd_run(q, x0, c);
  CHECK(t.termination == Termination::GradTol);
  CHECK(q.gradient(t.final_x).norm() <= 1e-8);
  double prev = q.value(x0);
  for (const auto& r : t.records) {
    CHECK(r.f_value <= prev);
    CHECK(r.coord_cost == 12);
    prev = r.f_value;
  }
}

TEST_CASE("CD stays monotone at the roundoff floor") {
  // f* is about -5.8: decreases below one ulp of f cannot be certified, so CD
  // stops moving near sqrt(eps |f| L) instead of reaching 1e-8.
  Rng rng(2);
  const Matrix a = spd(rng, 12, 0.5);
  const Quadratic q(a, gaussian(rng, 12));
  CdConfig c;
  c.schedule = ConstantSchedule{12};
  c.stop.grad_tol = 1e-8;
  c.stop.max_iters = 3000;
  c.full_grad_every = 1;
  const Vector x0 = Vector::Zero(12);
  const auto t = cd_run(q, x0, c);
  double prev = q.value(x0);
  for (const auto& r : t.records) {
    CHECK(r.f_value <= prev);
    prev = r.f_value;
  }
  const double lmax = spectral_norm_symmetric(a);
  const double floor = std::sqrt(std::numeric_limits<double>::epsilon() * std::abs(prev) * lmax);
  CHECK(q.gradient(t.final_x).norm() <= 10.0 * floor);
  auto p = q.bind(t.final_x);
  const auto rep = cd_step(*p, CoordinateSubset::full(12), ArmijoParams{});
  if (rep.noise_floor) CHECK(p->x() == t.final_x);
}

TEST_CASE("CD immediate stop and determinism") {
  const RegularizedLogistic f(make_synthetic_classification(25, 120, 4), 0.1);
  CdConfig c;
  c.stop.grad_tol = 1e3;
  CHECK(cd_run(f, Vector::Zero(25), c).records.size() == 1);
  c.stop.grad_tol = 1e-9;
  c.stop.max_iters = 100;
  c.schedule = ConstantSchedule{4};
  c.seed = 9;
  c.record_time = false;
  const auto a = cd_run(f, Vector::Zero(25), c);
  const auto b = cd_run(f, Vector::Zero(25), c);
  CHECK(a.final_x == b.final_x);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) CHECK(a.records[k].f_value == b.records[k].f_value);
}

TEST_CASE("CD and SSCN see the same subsets for the same seed") {
  const RegularizedLogistic f(make_synthetic_classification(25, 120, 5), 0.1);
  CdConfig cd;
  cd.schedule = ConstantSchedule{3};
  cd.seed = 21;
  cd.stop.max_iters = 30;
  cd.keep_iterates = true;
  OptimizerConfig sc;
  sc.schedule = ConstantSchedule{3};
  sc.seed = 21;
  sc.stop.max_iters = 30;
  sc.keep_iterates = true;
  const Vector x0 = Vector::Zero(25);
  const auto a = cd_run(f, x0, cd);
  const auto b = run(f, x0, sc);
  REQUIRE(a.iterates.size() == b.iterates.size());
  Vector pa = x0, pb = x0;
  for (std::size_t k = 0; k < a.iterates.size(); ++k) {
    // every coordinate moved by either method lies in the shared subset
    std::vector<std::size_t> moved;
    for (Index j = 0; j < 25; ++j) {
      if (a.iterates[k][j] != pa[j] || b.iterates[k][j] != pb[j]) moved.push_back(static_cast<std::size_t>(j));
    }
    CHECK(moved.size() <= 3);
    pa = a.iterates[k];
    pb = b.iterates[k];
  }
}

TEST_CASE("SSCN with tau = n reproduces the dense cubic Newton reference") {
  const RegularizedLogistic f(make_synthetic_classification(20, 100, 6), 0.1);
  Rng rng(3);
  const Quadratic q(spd(rng, 10, 0.2), gaussian(rng, 10));
  const SaddleQuartic saddle(6, 0.25);
  const std::vector<std::pair<const Objective*, Vector>> fixtures = {
      {&f, Vector::Zero(20)}, {&q, Vector::Zero(10)}, {&saddle, Vector::Constant(6, 1e-3)}};
  for (const auto& [obj, x0] : fixtures) {
    for (MPolicy p : {MPolicy{AdaptiveDoublingM{}}, MPolicy{FixedM{2.0}}}) {
      OptimizerConfig c;
      c.m_policy = p;
      c.schedule = ConstantSchedule{obj->dimension()};
      c.stop.grad_tol = 1e-9;
      c.stop.max_iters = 60;
      c.keep_iterates = true;
      const auto s = run(*obj, x0, c);
      const auto r = reference_cubic_newton_run(*obj, x0, c);
      const auto cr = full_cubic_newton_run(*obj, x0, c);
      CHECK(s.iterates.size() == r.iterates.size());
      CHECK(max_iterate_gap(s, r) <= 1e-10);
      CHECK(cr.method == "cr");
      CHECK(cr.final_x == s.final_x);
    }
  }
}

TEST_CASE("cubic Newton approaches the Newton step as M shrinks") {
  Rng rng(4);
  const Matrix a = spd(rng, 6, 1.0);
  const Vector b = gaussian(rng, 6);
  const Quadratic q(a, b);
  const Vector x0 = Vector::Zero(6);
  const Vector newton = x0 - a.ldlt().solve(q.gradient(x0));
  double last = std::numeric_limits<double>::infinity();
  for (double m : {1.0, 1e-2, 1e-4, 1e-6}) {
    OptimizerConfig c;
    c.m_policy = AdaptiveDoublingM{m, 2.0, 0.5, m};
    c.stop.max_iters = 1;
    const auto t = full_cubic_newton_run(q, x0, c);
    const double gap = (t.final_x - newton).norm();
    CHECK(gap < last);
    last = gap;
  }
  CHECK(last < 1e-5);
}

TEST_CASE("cubic Newton escapes the saddle") {
  const SaddleQuartic f(6, 0.25);
  OptimizerConfig c;
  c.stop.grad_tol = 1e-8;
  c.stop.max_iters = 500;
  c.full_grad_every = 1;
  const auto t = full_cubic_newton_run(f, Vector::Constant(6, 1e-3), c);
  CHECK(t.termination == Termination::GradTol);
  CHECK(min_eigenvalue_symmetric(f.hessian(t.final_x)) >= -1e-3);
  CHECK(std::abs(std::abs(t.final_x[1]) - std::sqrt(2.0)) < 1e-6);
}

TEST_CASE("CD configuration validation") {
  CdConfig c;
  c.armijo.c = 1.0;
  CHECK_THROWS(validate(c, 3));
  c = CdConfig{};
  c.armijo.backtrack = 0.0;
  CHECK_THROWS(validate(c, 3));
  c = CdConfig{};
  c.stop.max_iters = 0;
  CHECK_THROWS(validate(c, 3));
}
