#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"

#include "evolab/kernels.hpp"

using namespace evolab;
using kernels::Exec;

TEST_SUITE("kernels") {

TEST_CASE("splitmix64 is deterministic and sensitive to its input") {
  CHECK(kernels::splitmix64(1) == kernels::splitmix64(1));
  CHECK(kernels::splitmix64(1) != kernels::splitmix64(2));
  CHECK(kernels::splitmix64(0) != 0);
}

TEST_CASE("indexed_rng reproduces per-index streams") {
  auto a = kernels::indexed_rng(7, 3, 1);
  auto b = kernels::indexed_rng(7, 3, 1);
  CHECK(a() == b());
  CHECK(kernels::indexed_rng(7, 3, 1)() != kernels::indexed_rng(7, 4, 1)());
  CHECK(kernels::indexed_rng(7, 3, 1)() != kernels::indexed_rng(7, 3, 2)());
  CHECK(kernels::indexed_rng(8, 3, 1)() != kernels::indexed_rng(7, 3, 1)());
}

TEST_CASE("max_over matches between execution modes and handles empty ranges") {
  auto f = [](std::int64_t i) {
    return std::sin(1e-3 * static_cast<double>(i)) * static_cast<double>((i % 17) - 8);
  };
  const double s = kernels::max_over(20011, f, Exec::serial);
  const double par = kernels::max_over(20011, f, Exec::parallel);
  CHECK(s == par);
  CHECK(kernels::max_over(0, f, Exec::serial) == -std::numeric_limits<double>::infinity());
  CHECK(kernels::max_over(0, f, Exec::parallel) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("argmax_over picks the smallest index among ties") {
  auto f = [](std::int64_t i) { return (i == 5 || i == 9) ? 2.0 : 0.0; };
  for (Exec e : {Exec::serial, Exec::parallel}) {
    const auto [v, arg] = kernels::argmax_over(100, f, e);
    CHECK(v == 2.0);
    CHECK(arg == 5);
  }
}

TEST_CASE("ordered_fold preserves factor order in both modes") {
  auto factor = [](std::int64_t i) { return std::string(1, static_cast<char>('a' + i % 26)); };
  auto combine = [](const std::string& x, const std::string& y) { return x + y; };
  for (std::int64_t count : {std::int64_t{1}, std::int64_t{63}, std::int64_t{64},
                             std::int64_t{65}, std::int64_t{300}}) {
    std::string naive;
    for (std::int64_t i = 0; i < count; ++i) naive += factor(i);
    CHECK(kernels::ordered_fold<std::string>(count, factor, combine, "", Exec::serial) == naive);
    CHECK(kernels::ordered_fold<std::string>(count, factor, combine, "", Exec::parallel) == naive);
  }
}

TEST_CASE("ordered_fold float accumulation is bit-identical across modes") {
  auto factor = [](std::int64_t i) { return 1.0 + 1e-7 * static_cast<double>(i % 101); };
  auto combine = [](double x, double y) { return x * y; };
  const double s = kernels::ordered_fold<double>(4096, factor, combine, 1.0, Exec::serial);
  const double p = kernels::ordered_fold<double>(4096, factor, combine, 1.0, Exec::parallel);
  CHECK(s == p);
}

}  // TEST_SUITE
