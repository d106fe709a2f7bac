#include "sscn/subset.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace sscn {

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  // Lemire's nearly-divisionless method.
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

CoordinateSubset::CoordinateSubset(std::vector<std::size_t> indices, std::size_t n)
    : indices_(std::move(indices)), n_(n) {
  if (indices_.empty() || indices_.size() > n_) {
    throw std::invalid_argument("CoordinateSubset: size " + std::to_string(indices_.size()) +
                                " outside [1, " + std::to_string(n_) + "]");
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= n_) throw std::out_of_range("CoordinateSubset: index out of range");
    if (i > 0 && indices_[i] <= indices_[i - 1]) {
      throw std::invalid_argument("CoordinateSubset: indices must be strictly increasing");
    }
  }
}

CoordinateSubset CoordinateSubset::full(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return CoordinateSubset(std::move(idx), n);
}

bool CoordinateSubset::contains(std::size_t j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

CoordinateSubset sample_uniform(std::size_t n, std::size_t tau, Rng& rng) {
  if (tau < 1 || tau > n) {
    throw std::invalid_argument("sample_uniform: tau=" + std::to_string(tau) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  if (tau == n) return CoordinateSubset::full(n);

  // Virtual permutation of [n]; only displaced slots are stored.
  std::unordered_map<std::size_t, std::size_t> swapped;
  swapped.reserve(2 * tau);
  auto slot = [&](std::size_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<std::size_t> picked(tau);
  for (std::size_t i = 0; i < tau; ++i) {
    std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
    std::size_t vi = slot(i);
    std::size_t vj = slot(j);
    picked[i] = vj;
    swapped[j] = vi;
  }
  std::sort(picked.begin(), picked.end());
  return CoordinateSubset(std::move(picked), n);
}

Vector restrict_vector(const Vector& x, const CoordinateSubset& s) {
  require_dimension(x.size(), static_cast<Index>(s.ambient()), "restrict_vector");
  Vector out(static_cast<Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) out[static_cast<Index>(i)] = x[static_cast<Index>(s[i])];
  return out;
}

Vector embed_vector(const Vector& h, const CoordinateSubset& s, std::size_t n) {
  require_dimension(h.size(), static_cast<Index>(s.size()), "embed_vector");
  if (s.ambient() != n) throw DimensionError("embed_vector: subset ambient dimension differs from n");
  Vector out = Vector::Zero(static_cast<Index>(n));
  for (std::size_t i = 0; i < s.size(); ++i) out[static_cast<Index>(s[i])] = h[static_cast<Index>(i)];
  return out;
}

void add_on_subset(Vector& x, const CoordinateSubset& s, const Vector& h) {
  require_dimension(x.size(), static_cast<Index>(s.ambient()), "add_on_subset");
  require_dimension(h.size(), static_cast<Index>(s.size()), "add_on_subset");
  for (std::size_t i = 0; i < s.size(); ++i) x[static_cast<Index>(s[i])] += h[static_cast<Index>(i)];
}

Matrix restrict_matrix(const Matrix& a, const CoordinateSubset& s) {
  require_dimension(a.rows(), static_cast<Index>(s.ambient()), "restrict_matrix");
  require_dimension(a.cols(), static_cast<Index>(s.ambient()), "restrict_matrix");
  const auto t = static_cast<Index>(s.size());
  Matrix out(t, t);
  for (Index i = 0; i < t; ++i)
    for (Index j = 0; j < t; ++j) out(i, j) = a(static_cast<Index>(s[i]), static_cast<Index>(s[j]));
  return out;
}

}  // namespace sscn
