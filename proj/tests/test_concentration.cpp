#include "sscn/concentration.hpp"
#include "sscn/synthetic.hpp"

#include <doctest.h>

using namespace sscn;

namespace {

// Exhaustive average over all tau-subsets of [n].
template <class F>
double enumerate_mean(std::size_t n, std::size_t tau, F&& f) {
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(tau), true);
  double sum = 0.0;
  std::size_t count = 0;
  do {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) idx.push_back(i);
    sum += f(CoordinateSubset(idx, n));
    ++count;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return sum / static_cast<double>(count);
}

double grad_gap(const Vector& g, const CoordinateSubset& s) {
  return (g - embed_vector(restrict_vector(g, s), s, s.ambient())).squaredNorm();
}

double hess_gap(const Matrix& h, const CoordinateSubset& s) {
  Matrix hs = Matrix::Zero(h.rows(), h.cols());
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = 0; b < s.size(); ++b) hs(s[a], s[b]) = h(s[a], s[b]);
  return (h - hs).squaredNorm();
}

}  // namespace

TEST_CASE("all-ones gradient, n = 4, tau = 2") {
  const Vector g = Vector::Ones(4);
  CHECK(enumerate_mean(4, 2, [&](const CoordinateSubset& s) { return grad_gap(g, s); }) == 2.0);
  CHECK(exact_gradient_gap(g, 2) == 2.0);
}

TEST_CASE("identity Hessian, n = 4, tau = 2") {
  // Only diagonal entries exist, so the gap is (1 - tau/n) * 4 = 2.
  const Matrix h = Matrix::Identity(4, 4);
  CHECK(enumerate_mean(4, 2, [&](const CoordinateSubset& s) { return hess_gap(h, s); }) == 2.0);
  CHECK(exact_hessian_gap(h, 2) == 2.0);
  CHECK(pair_inclusion_probability(2, 4) == doctest::Approx(1.0 / 6.0));
  CHECK(hessian_gap_bound(h, 2) == doctest::Approx(10.0 / 3.0));
}

TEST_CASE("exact identities match enumeration on random data") {
  Rng rng(1);
  const std::size_t n = 7;
  Vector g(7);
  Matrix h(7, 7);
  for (Index i = 0; i < 7; ++i) {
    g[i] = standard_normal(rng);
    for (Index j = 0; j <= i; ++j) h(i, j) = h(j, i) = standard_normal(rng);
  }
  for (std::size_t tau = 1; tau <= n; ++tau) {
    CAPTURE(tau);
    CHECK(enumerate_mean(n, tau, [&](const CoordinateSubset& s) { return grad_gap(g, s); }) ==
          doctest::Approx(exact_gradient_gap(g, tau)).epsilon(1e-13));
    CHECK(enumerate_mean(n, tau, [&](const CoordinateSubset& s) { return hess_gap(h, s); }) ==
          doctest::Approx(exact_hessian_gap(h, tau)).epsilon(1e-13));
    CHECK(exact_hessian_gap(h, tau) <= hessian_gap_bound(h, tau) + 1e-12);
  }
}

TEST_CASE("full sampling has no gap") {
  Rng rng(2);
  const auto est = concentration_probe(Vector::Ones(5), Matrix::Ones(5, 5), 5, 100, rng);
  CHECK(est.mean_sq_grad_gap == 0.0);
  CHECK(est.mean_sq_hess_fro_gap == 0.0);
}

TEST_CASE("Monte-Carlo moments within three standard errors") {
  Rng rng(3);
  const Index n = 30;
  Vector g(n);
  Matrix h(n, n);
  for (Index i = 0; i < n; ++i) {
    g[i] = standard_normal(rng);
    for (Index j = 0; j <= i; ++j) h(i, j) = h(j, i) = standard_normal(rng);
  }
  for (std::size_t tau : {1u, 4u, 15u, 29u}) {
    CAPTURE(tau);
    const auto est = concentration_probe(g, h, tau, 20000, rng, tau == 4);
    const double sampled = static_cast<double>(tau) / n * g.squaredNorm();
    CHECK(std::abs(est.mean_sq_sampled_grad - sampled) <= 3.0 * est.sem_sampled_grad);
    CHECK(std::abs(est.mean_sq_grad_gap - exact_gradient_gap(g, tau)) <= 3.0 * est.sem_grad_gap);
    CHECK(std::abs(est.mean_sq_hess_fro_gap - exact_hessian_gap(h, tau)) <= 3.0 * est.sem_hess_gap);
    CHECK(est.spectral_exceeds_frobenius == 0);
  }
}
