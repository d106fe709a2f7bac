#pragma once

#include "sscn/types.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sscn {

/// The pinned generator: every subset sequence is a function of the 64-bit
/// seed through mt19937_64 and `uniform_below`, independent of the standard
/// library's distribution implementations.
using Rng = std::mt19937_64;

/// Unbiased integer in [0, bound) by multiply-shift with rejection.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) from the top 53 bits.
double uniform_unit(Rng& rng);

/// Sorted, duplicate-free coordinate set S within an ambient dimension n.
class CoordinateSubset {
 public:
  CoordinateSubset() = default;
  /// Validates: indices strictly increasing, all < n, size in [1, n].
  CoordinateSubset(std::vector<std::size_t> indices, std::size_t n);

  static CoordinateSubset full(std::size_t n);

  std::size_t size() const { return indices_.size(); }  // tau(S)
  std::size_t ambient() const { return n_; }
  std::span<const std::size_t> indices() const { return indices_; }
  std::size_t operator[](std::size_t i) const { return indices_[i]; }
  bool contains(std::size_t j) const;
  bool is_full() const { return indices_.size() == n_; }

  bool operator==(const CoordinateSubset&) const = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t n_ = 0;
};

/// Uniform tau-subset of [n] via sparse partial Fisher-Yates (O(tau)
/// expected work), returned sorted.
CoordinateSubset sample_uniform(std::size_t n, std::size_t tau, Rng& rng);

Vector restrict_vector(const Vector& x, const CoordinateSubset& s);
Vector embed_vector(const Vector& h, const CoordinateSubset& s, std::size_t n);
/// x|_S += h, touching only the sampled coordinates.
void add_on_subset(Vector& x, const CoordinateSubset& s, const Vector& h);
/// Rows and columns of a square matrix indexed by S.
Matrix restrict_matrix(const Matrix& a, const CoordinateSubset& s);

}  // namespace sscn
