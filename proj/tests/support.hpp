#pragma once

// Shared test fixtures: seeded element/curve generators and a dense matrix
// oracle that bypasses the structure-constant multiply entirely.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "evolab/algebra.hpp"
#include "evolab/curve.hpp"
#include "evolab/kernels.hpp"
#include "evolab/seminorm.hpp"

namespace testsup {

using namespace evolab;

inline Element<Real> random_element(const AlgebraPtr<Real>& a, std::uint64_t seed,
                                    std::uint64_t idx) {
  auto rng = kernels::indexed_rng(seed, idx, 0xBEEF);
  std::normal_distribution<double> g;
  std::vector<Real> c(static_cast<std::size_t>(a->dim()));
  for (auto& v : c) v = g(rng);
  return make_element(a, std::move(c));
}

inline Element<Complex> random_element_c(const AlgebraPtr<Complex>& a, std::uint64_t seed,
                                         std::uint64_t idx) {
  auto rng = kernels::indexed_rng(seed, idx, 0xBEEF);
  std::normal_distribution<double> g;
  std::vector<Complex> c(static_cast<std::size_t>(a->dim()));
  for (auto& v : c) {
    const double re = g(rng);
    const double im = g(rng);
    v = Complex(re, im);
  }
  return make_element(a, std::move(c));
}

/// Element of a full matrix algebra scaled so p(x) equals `target` exactly.
inline Element<Real> random_with_norm(const AlgebraPtr<Real>& a, const Seminorm<Real>& p,
                                      double target, std::uint64_t seed, std::uint64_t idx) {
  for (std::uint64_t tries = 0;; ++tries) {
    Element<Real> x = random_element(a, seed, idx * 977 + tries);
    const double n = p(x);
    if (n > 1e-8) return (target / n) * x;
  }
}

/// Row-major dense view of a full matrix algebra element; independent of
/// mul_into (plain loops, no shared code).
inline Eigen::MatrixXd dense_of(const Element<Real>& x) {
  const int n = x.alg->param();
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = x.c[static_cast<std::size_t>(r * n + c)];
  return m;
}

inline Element<Real> element_of(const AlgebraPtr<Real>& a, const Eigen::MatrixXd& m) {
  const int n = a->param();
  std::vector<Real> c(static_cast<std::size_t>(n * n));
  for (int r = 0; r < n; ++r)
    for (int cc = 0; cc < n; ++cc) c[static_cast<std::size_t>(r * n + cc)] = m(r, cc);
  return make_element(a, std::move(c));
}

/// gamma(t) = x0 + t*x1 on a single cell.
inline Curve<Real> linear_curve(const AlgebraPtr<Real>& a, const Element<Real>& x0,
                                const Element<Real>& x1) {
  typename Curve<Real>::CellPoly cell{x0.c, x1.c};
  return Curve<Real>::poly(a, {0.0, 1.0}, {cell});
}

/// Seeded gamma(t) = x0 + t*x1 with |gamma|_{C0,p} <= bound (worst case
/// p(x0) + p(x1) is pinned to `bound` times u in [0.5, 1]).
inline Curve<Real> random_linear_curve(const AlgebraPtr<Real>& a, const Seminorm<Real>& p,
                                       double bound, std::uint64_t seed, std::uint64_t idx) {
  auto rng = kernels::indexed_rng(seed, idx, 0xC0FFEE);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  const double total = bound * u(rng);
  const double split = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
  const Element<Real> x0 = random_with_norm(a, p, total * split, seed, idx * 2 + 1);
  const Element<Real> x1 = random_with_norm(a, p, total * (1.0 - split), seed, idx * 2 + 2);
  return linear_curve(a, x0, x1);
}

inline double sup_distance(const Curve<Real>& f, const Curve<Real>& g, const Seminorm<Real>& p,
                           int grid = 257) {
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid - 1);
    best = std::max(best, p(f.eval(t) - g.eval(t)));
  }
  return best;
}

}  // namespace testsup
