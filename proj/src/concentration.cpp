#include "sscn/concentration.hpp"

#include "sscn/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sscn {
namespace {

constexpr std::size_t kTrialsPerBlock = 1024;

struct Moments {
  double grad = 0.0, grad_sq = 0.0;
  double hess = 0.0, hess_sq = 0.0;
  double sampled = 0.0, sampled_sq = 0.0;
  std::size_t spectral_violations = 0;

  void add(const Moments& o) {
    grad += o.grad;
    grad_sq += o.grad_sq;
    hess += o.hess;
    hess_sq += o.hess_sq;
    sampled += o.sampled;
    sampled_sq += o.sampled_sq;
    spectral_violations += o.spectral_violations;
  }
};

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Moments run_block(const Vector& g, const Matrix& h, std::size_t tau, std::size_t trials, std::uint64_t seed,
                  double g_sq, double h_sq, bool check_spectral) {
  const std::size_t n = static_cast<std::size_t>(g.size());
  Rng rng(seed);
  Moments m;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = sample_uniform(n, tau, rng);
    double kept_g = 0.0;
    double kept_h = 0.0;
    for (std::size_t a = 0; a < s.size(); ++a) {
      const auto i = static_cast<Index>(s[a]);
      kept_g += g[i] * g[i];
      for (std::size_t b = 0; b < s.size(); ++b) {
        const double v = h(i, static_cast<Index>(s[b]));
        kept_h += v * v;
      }
    }
    // Full sampling loses nothing; avoid a roundoff residue from subtracting.
    const double grad_gap = s.is_full() ? 0.0 : g_sq - kept_g;
    const double hess_gap = s.is_full() ? 0.0 : h_sq - kept_h;
    m.grad += grad_gap;
    m.grad_sq += grad_gap * grad_gap;
    m.hess += hess_gap;
    m.hess_sq += hess_gap * hess_gap;
    m.sampled += kept_g;
    m.sampled_sq += kept_g * kept_g;
    if (check_spectral) {
      Matrix diff = -h;
      for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = 0; b < s.size(); ++b)
          diff(static_cast<Index>(s[a]), static_cast<Index>(s[b])) = 0.0;
      const double fro = diff.norm();
      if (spectral_norm_symmetric(diff) > fro * (1.0 + 1e-12) + 1e-300) ++m.spectral_violations;
    }
  }
  return m;
}

void check_inputs(const Vector& g, const Matrix& h, std::size_t tau, std::size_t trials) {
  const auto n = static_cast<std::size_t>(g.size());
  require_dimension(h.rows(), g.size(), "concentration_probe");
  require_dimension(h.cols(), g.size(), "concentration_probe");
  if (tau < 1 || tau > n) throw std::invalid_argument("concentration_probe: tau outside [1, n]");
  if (trials < 1) throw std::invalid_argument("concentration_probe: trials must be >= 1");
}

ConcentrationEstimate finish(const Moments& m, std::size_t trials) {
  const auto t = static_cast<double>(trials);
  auto sem = [&](double sum, double sum_sq) {
    if (trials < 2) return 0.0;
    const double mean = sum / t;
    const double var = std::max(0.0, (sum_sq - t * mean * mean) / (t - 1.0));
    return std::sqrt(var / t);
  };
  ConcentrationEstimate e;
  e.mean_sq_grad_gap = m.grad / t;
  e.mean_sq_hess_fro_gap = m.hess / t;
  e.mean_sq_sampled_grad = m.sampled / t;
  e.sem_grad_gap = sem(m.grad, m.grad_sq);
  e.sem_hess_gap = sem(m.hess, m.hess_sq);
  e.sem_sampled_grad = sem(m.sampled, m.sampled_sq);
  e.spectral_exceeds_frobenius = m.spectral_violations;
  return e;
}

}  // namespace

ConcentrationEstimate concentration_probe(const Vector& g, const Matrix& h, std::size_t tau, std::size_t trials,
                                          Rng& rng, bool check_spectral) {
  check_inputs(g, h, tau, trials);
  const std::uint64_t base = rng();
  const double g_sq = g.squaredNorm();
  const double h_sq = h.squaredNorm();
  const std::size_t blocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  std::vector<Moments> partial(blocks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kTrialsPerBlock;
    const std::size_t count = std::min(trials, lo + kTrialsPerBlock) - lo;
    partial[static_cast<std::size_t>(b)] =
        run_block(g, h, tau, count, splitmix64(base + static_cast<std::uint64_t>(b)), g_sq, h_sq, check_spectral);
  }
  Moments total;
  for (const auto& p : partial) total.add(p);
  return finish(total, trials);
}

namespace serial {

ConcentrationEstimate concentration_probe(const Vector& g, const Matrix& h, std::size_t tau, std::size_t trials,
                                          Rng& rng, bool check_spectral) {
  check_inputs(g, h, tau, trials);
  const std::uint64_t base = rng();
  const double g_sq = g.squaredNorm();
  const double h_sq = h.squaredNorm();
  Moments total;
  for (std::size_t lo = 0, b = 0; lo < trials; lo += kTrialsPerBlock, ++b) {
    const std::size_t count = std::min(trials, lo + kTrialsPerBlock) - lo;
    total.add(run_block(g, h, tau, count, splitmix64(base + b), g_sq, h_sq, check_spectral));
  }
  return finish(total, trials);
}

}  // namespace serial

double exact_gradient_gap(const Vector& g, std::size_t tau) {
  const auto n = static_cast<double>(g.size());
  return (1.0 - static_cast<double>(tau) / n) * g.squaredNorm();
}

double pair_inclusion_probability(std::size_t tau, std::size_t n) {
  if (n < 2) return 1.0;
  const auto t = static_cast<double>(tau);
  const auto nn = static_cast<double>(n);
  return t * (t - 1.0) / (nn * (nn - 1.0));
}

double exact_hessian_gap(const Matrix& h, std::size_t tau) {
  const auto n = static_cast<std::size_t>(h.rows());
  const double diag = h.diagonal().squaredNorm();
  const double off = h.squaredNorm() - diag;
  return (1.0 - static_cast<double>(tau) / static_cast<double>(n)) * diag +
         (1.0 - pair_inclusion_probability(tau, n)) * off;
}

double hessian_gap_bound(const Matrix& h, std::size_t tau) {
  return (1.0 - pair_inclusion_probability(tau, static_cast<std::size_t>(h.rows()))) * h.squaredNorm();
}

}  // namespace sscn
