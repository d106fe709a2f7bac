#include "sscn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sscn::kernels {
namespace {

constexpr std::size_t kGroupsPerChunk = 256;
constexpr std::size_t kGramBudget = std::size_t{1} << 22;  // doubles of chunk-local storage

template <class Term>
double blocked_sum(std::size_t n, Term term) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  if (blocks <= 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
  }
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

double column_gradient(const CompressedMatrix& csc, const Vector& labels, const Vector& z, std::size_t j) {
  double s = 0.0;
  for (std::size_t p = csc.outer[j]; p < csc.outer[j + 1]; ++p) {
    const auto i = static_cast<Index>(csc.inner[p]);
    s -= labels[i] * csc.values[p] * sigmoid_neg(z[i]);
  }
  return s;
}

void add_group(Matrix& out, const SampleGroups& groups, std::span<const double> weights, std::size_t g) {
  const double w = weights[g];
  const std::size_t lo = groups.group_start[g];
  const std::size_t hi = groups.group_start[g + 1];
  // upper triangle only, mirrored, so the result is exactly symmetric
  for (std::size_t p = lo; p < hi; ++p) {
    const auto a = static_cast<Index>(groups.local[p]);
    const double wa = w * groups.values[p];
    out(a, a) += wa * groups.values[p];
    for (std::size_t q = p + 1; q < hi; ++q) {
      const auto b = static_cast<Index>(groups.local[q]);
      const double v = wa * groups.values[q];
      out(a, b) += v;
      out(b, a) += v;
    }
  }
}

}  // namespace

double log1p_exp_neg(double z) {
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double sigmoid_neg(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

SampleGroups group_by_sample(const CompressedMatrix& csc, std::span<const std::size_t> columns) {
  struct Triple {
    std::size_t sample;
    std::size_t local;
    double value;
  };
  std::vector<Triple> triples;
  std::size_t total = 0;
  for (std::size_t j : columns) total += csc.outer[j + 1] - csc.outer[j];
  triples.reserve(total);
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const std::size_t j = columns[k];
    for (std::size_t p = csc.outer[j]; p < csc.outer[j + 1]; ++p) triples.push_back({csc.inner[p], k, csc.values[p]});
  }
  std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
    return a.sample != b.sample ? a.sample < b.sample : a.local < b.local;
  });

  SampleGroups g;
  g.local.reserve(triples.size());
  g.values.reserve(triples.size());
  for (std::size_t p = 0; p < triples.size(); ++p) {
    if (p == 0 || triples[p].sample != triples[p - 1].sample) {
      g.samples.push_back(triples[p].sample);
      g.group_start.push_back(p);
    }
    g.local.push_back(triples[p].local);
    g.values.push_back(triples[p].value);
  }
  g.group_start.push_back(triples.size());
  return g;
}

void margins(const CompressedMatrix& csr, const Vector& labels, const Vector& x, Vector& z) {
  z.resize(static_cast<Index>(csr.rows));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(csr.rows); ++i) {
    double s = 0.0;
    for (std::size_t p = csr.outer[static_cast<std::size_t>(i)]; p < csr.outer[static_cast<std::size_t>(i) + 1]; ++p) {
      s += csr.values[p] * x[static_cast<Index>(csr.inner[p])];
    }
    z[i] = labels[i] * s;
  }
}

double logistic_loss_sum(const Vector& z) {
  return blocked_sum(static_cast<std::size_t>(z.size()), [&](std::size_t i) { return log1p_exp_neg(z[static_cast<Index>(i)]); });
}

void column_gradients(const CompressedMatrix& csc, const Vector& labels, const Vector& z,
                      std::span<const std::size_t> columns, std::span<double> out) {
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(columns.size()); ++k) {
    out[static_cast<std::size_t>(k)] = column_gradient(csc, labels, z, columns[static_cast<std::size_t>(k)]);
  }
}

Matrix weighted_gram(const SampleGroups& groups, std::span<const double> weights, std::size_t tau) {
  const auto t = static_cast<Index>(tau);
  const std::size_t n_groups = groups.samples.size();
  const std::size_t by_work = (n_groups + kGroupsPerChunk - 1) / kGroupsPerChunk;
  const std::size_t by_memory = std::max<std::size_t>(1, kGramBudget / std::max<std::size_t>(1, tau * tau));
  const std::size_t chunks = std::max<std::size_t>(1, std::min(by_work, by_memory));
  if (chunks == 1) return serial::weighted_gram(groups, weights, tau);

  std::vector<Matrix> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = n_groups * static_cast<std::size_t>(c) / chunks;
    const std::size_t hi = n_groups * (static_cast<std::size_t>(c) + 1) / chunks;
    Matrix local = Matrix::Zero(t, t);
    for (std::size_t g = lo; g < hi; ++g) add_group(local, groups, weights, g);
    partial[static_cast<std::size_t>(c)] = std::move(local);
  }
  Matrix out = std::move(partial[0]);
  for (std::size_t c = 1; c < chunks; ++c) out += partial[c];
  return out;
}

namespace serial {

void margins(const CompressedMatrix& csr, const Vector& labels, const Vector& x, Vector& z) {
  z.resize(static_cast<Index>(csr.rows));
  for (std::size_t i = 0; i < csr.rows; ++i) {
    double s = 0.0;
    for (std::size_t p = csr.outer[i]; p < csr.outer[i + 1]; ++p) s += csr.values[p] * x[static_cast<Index>(csr.inner[p])];
    z[static_cast<Index>(i)] = labels[static_cast<Index>(i)] * s;
  }
}

double logistic_loss_sum(const Vector& z) {
  double s = 0.0;
  for (Index i = 0; i < z.size(); ++i) s += log1p_exp_neg(z[i]);
  return s;
}

void column_gradients(const CompressedMatrix& csc, const Vector& labels, const Vector& z,
                      std::span<const std::size_t> columns, std::span<double> out) {
  for (std::size_t k = 0; k < columns.size(); ++k) out[k] = column_gradient(csc, labels, z, columns[k]);
}

Matrix weighted_gram(const SampleGroups& groups, std::span<const double> weights, std::size_t tau) {
  const auto t = static_cast<Index>(tau);
  Matrix out = Matrix::Zero(t, t);
  for (std::size_t g = 0; g < groups.samples.size(); ++g) add_group(out, groups, weights, g);
  return out;
}

}  // namespace serial
}  // namespace sscn::kernels
