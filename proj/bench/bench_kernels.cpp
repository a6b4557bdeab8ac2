// Serial vs parallel timings for the reduction kernels and their two heaviest
// callers.  Both modes must return identical results; the tests enforce that,
// this target shows what the parallel path buys.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "evolab/algebra.hpp"
#include "evolab/kernels.hpp"
#include "evolab/seminorm.hpp"

using namespace evolab;

namespace {

void bm_max_over(benchmark::State& state) {
  const auto exec = state.range(0) ? kernels::Exec::parallel : kernels::Exec::serial;
  const std::int64_t n = 1 << 20;
  for (auto _ : state) {
    const double m = kernels::max_over(
        n, [](std::int64_t i) { return std::sin(static_cast<double>(i)); }, exec);
    benchmark::DoNotOptimize(m);
  }
}

void bm_ordered_fold(benchmark::State& state) {
  const auto exec = state.range(0) ? kernels::Exec::parallel : kernels::Exec::serial;
  using Mat = Eigen::Matrix4d;
  const Mat id = Mat::Identity();
  auto factor = [](std::int64_t i) -> Mat {
    Mat m = Mat::Identity();
    m(0, 1) = 1e-4 * static_cast<double>(i % 17);
    m(2, 3) = -1e-4 * static_cast<double>(i % 13);
    return m;
  };
  auto combine = [](const Mat& a, const Mat& b) -> Mat { return a * b; };
  for (auto _ : state) {
    const Mat p = kernels::ordered_fold<Mat>(4096, factor, combine, id, exec);
    benchmark::DoNotOptimize(p);
  }
}

void bm_mu_norm_sampled(benchmark::State& state) {
  const auto exec = state.range(0) ? kernels::Exec::parallel : kernels::Exec::serial;
  auto a = Algebra<Real>::matrix(2);
  const auto p = Seminorm<Real>::matrix_opnorm(a, NormWhich::two);
  MuNormOptions mo;
  mo.samples = 10000;
  mo.exec = exec;
  for (auto _ : state) {
    const auto est = mu_norm(p, p, 3, MuNormMode::sampled, mo);
    benchmark::DoNotOptimize(est.lower);
  }
}

void bm_structure_checks(benchmark::State& state) {
  const auto exec = state.range(0) ? kernels::Exec::parallel : kernels::Exec::serial;
  const auto ref = Algebra<Real>::matrix(4);
  std::vector<Real> table;
  table.reserve(16 * 16 * 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      for (int k = 0; k < 16; ++k) table.push_back(ref->structure(i, j, k));
  AlgebraOptions ao;
  ao.exec = exec;
  for (auto _ : state) {
    const auto alg = Algebra<Real>::from_structure(16, table, ref->unit_coeffs(), ao);
    benchmark::DoNotOptimize(alg->dim());
  }
}

}  // namespace

BENCHMARK(bm_max_over)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ordered_fold)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_mu_norm_sampled)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_structure_checks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
