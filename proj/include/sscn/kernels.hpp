#pragma once

// Data-parallel kernels behind the logistic oracle. Each kernel has an
// OpenMP version in `sscn::kernels` and a plain serial version in
// `sscn::kernels::serial` that the tests and the benchmark compare against.
//
// Parallel reductions split the index range into fixed-size blocks and add
// the block partials in block order, so results depend only on the inputs and
// never on the thread count.

#include "sscn/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sscn::kernels {

/// Compressed sparse storage; `outer` has one more entry than the number of
/// major slices (rows for CSR, columns for CSC).
struct CompressedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> outer;
  std::vector<std::size_t> inner;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
};

/// Entries of the restricted design matrix A|_S grouped by sample: the
/// entries of sample `samples[g]` occupy [group_start[g], group_start[g+1]).
struct SampleGroups {
  std::vector<std::size_t> samples;
  std::vector<std::size_t> group_start;
  std::vector<std::size_t> local;  // position in S
  std::vector<double> values;
};

inline constexpr std::size_t kReductionBlock = 2048;

/// log(1 + exp(-z)) without overflow.
double log1p_exp_neg(double z);
/// 1 / (1 + exp(z)), i.e. sigma(-z).
double sigmoid_neg(double z);

SampleGroups group_by_sample(const CompressedMatrix& csc, std::span<const std::size_t> columns);

// z_i = y_i <a_i, x> from CSR rows.
void margins(const CompressedMatrix& csr, const Vector& labels, const Vector& x, Vector& z);
// sum_i log(1 + exp(-z_i))
double logistic_loss_sum(const Vector& z);
// out_k = sum_{i in column j_k} -y_i A_ij sigma(-z_i)
void column_gradients(const CompressedMatrix& csc, const Vector& labels, const Vector& z,
                      std::span<const std::size_t> columns, std::span<double> out);
// sum_g weights[g] a_g a_g^T over grouped entries, tau x tau.
Matrix weighted_gram(const SampleGroups& groups, std::span<const double> weights, std::size_t tau);

namespace serial {
void margins(const CompressedMatrix& csr, const Vector& labels, const Vector& x, Vector& z);
double logistic_loss_sum(const Vector& z);
void column_gradients(const CompressedMatrix& csc, const Vector& labels, const Vector& z,
                      std::span<const std::size_t> columns, std::span<double> out);
Matrix weighted_gram(const SampleGroups& groups, std::span<const double> weights, std::size_t tau);
}  // namespace serial

}  // namespace sscn::kernels
