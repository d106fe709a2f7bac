// Parallel kernels against their serial references on a synthetic dense
// design. Arg(0) selects the serial path, Arg(1) the OpenMP one.
#include "sscn/concentration.hpp"
#include "sscn/kernels.hpp"
#include "sscn/logistic.hpp"
#include "sscn/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

namespace {

using namespace sscn;
namespace k = sscn::kernels;

struct Fixture {
  SparseDataset data;
  k::CompressedMatrix csr;
  Vector labels;
  Vector x;
  Vector z;
  std::unique_ptr<RegularizedLogistic> obj;
  std::vector<std::size_t> columns;
  k::SampleGroups groups;
  std::vector<double> weights;

  Fixture() : data(make_synthetic_classification(400, 20000, 1)) {
    csr.rows = data.n_samples();
    csr.cols = data.n_features;
    csr.outer.push_back(0);
    for (const auto& row : data.rows) {
      for (const auto& e : row) {
        csr.inner.push_back(e.index);
        csr.values.push_back(e.value);
      }
      csr.outer.push_back(csr.inner.size());
    }
    labels.resize(static_cast<Index>(data.n_samples()));
    for (std::size_t i = 0; i < data.n_samples(); ++i) labels[static_cast<Index>(i)] = data.labels[i];
    Rng rng(2);
    x.resize(static_cast<Index>(data.n_features));
    for (Index j = 0; j < x.size(); ++j) x[j] = 0.1 * standard_normal(rng);
    k::serial::margins(csr, labels, x, z);
    obj = std::make_unique<RegularizedLogistic>(data, 0.1);
    const auto s = sample_uniform(data.n_features, 40, rng);
    columns.assign(s.indices().begin(), s.indices().end());
    groups = k::group_by_sample(obj->csc(), columns);
    weights.assign(groups.samples.size(), 0.25);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_Margins(benchmark::State& state) {
  auto& f = fixture();
  Vector z;
  for (auto _ : state) {
    if (state.range(0) == 0)
      k::serial::margins(f.csr, f.labels, f.x, z);
    else
      k::margins(f.csr, f.labels, f.x, z);
    benchmark::DoNotOptimize(z.data());
  }
}
BENCHMARK(BM_Margins)->Arg(0)->Arg(1);

void BM_LossSum(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) {
    const double v = state.range(0) == 0 ? k::serial::logistic_loss_sum(f.z) : k::logistic_loss_sum(f.z);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_LossSum)->Arg(0)->Arg(1);

void BM_ColumnGradients(benchmark::State& state) {
  auto& f = fixture();
  std::vector<double> out(f.columns.size());
  for (auto _ : state) {
    if (state.range(0) == 0)
      k::serial::column_gradients(f.obj->csc(), f.labels, f.z, f.columns, out);
    else
      k::column_gradients(f.obj->csc(), f.labels, f.z, f.columns, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ColumnGradients)->Arg(0)->Arg(1);

void BM_WeightedGram(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) {
    const Matrix g = state.range(0) == 0 ? k::serial::weighted_gram(f.groups, f.weights, f.columns.size())
                                         : k::weighted_gram(f.groups, f.weights, f.columns.size());
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_WeightedGram)->Arg(0)->Arg(1);

void BM_ConcentrationProbe(benchmark::State& state) {
  Rng init(3);
  const Index n = 50;
  Vector g(n);
  Matrix h(n, n);
  for (Index i = 0; i < n; ++i) {
    g[i] = standard_normal(init);
    for (Index j = 0; j <= i; ++j) h(i, j) = h(j, i) = standard_normal(init);
  }
  for (auto _ : state) {
    Rng rng(4);
    const auto est = state.range(0) == 0 ? serial::concentration_probe(g, h, 5, 4096, rng)
                                         : concentration_probe(g, h, 5, 4096, rng);
    benchmark::DoNotOptimize(est.mean_sq_grad_gap);
  }
}
BENCHMARK(BM_ConcentrationProbe)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
