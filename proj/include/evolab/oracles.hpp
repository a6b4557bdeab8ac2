#pragma once

// Independent reference solvers for eta' = eta*gamma.  None of these share
// series code with the Picard module: they work through dense linear algebra
// on the left regular representation (ordered step products, Pade matrix
// exponentials) or through closed forms available in special cases.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "evolab/algebra.hpp"
#include "evolab/curve.hpp"
#include "evolab/errors.hpp"
#include "evolab/kernels.hpp"

namespace evolab {

template <class S>
struct OracleResult {
  std::optional<Element<S>> element;  // endpoint oracles
  std::optional<Curve<S>> curve;      // trajectory oracles
  std::int64_t steps = 0;
  std::string method;
};

enum class StepVariant { euler, exponential };

/// Ordered midpoint product P = F_1 F_2 ... F_n (earliest factor leftmost)
/// with F_i = 1 + dt*gamma(t_i) or exp(dt*gamma(t_i)), t_i = (i - 1/2)*dt,
/// applied to the unit through the left regular representation.  First order
/// in dt for the Euler variant, second order for the exponential one.
template <class S>
OracleResult<S> step_product(const Curve<S>& gamma, std::int64_t steps,
                             StepVariant variant = StepVariant::euler,
                             kernels::Exec exec = kernels::Exec::parallel) {
  if (steps < 1) throw std::invalid_argument("step_product needs steps >= 1");
  const AlgebraPtr<S> alg = gamma.algebra();
  const int d = alg->dim();
  const double dt = 1.0 / static_cast<double>(steps);
  using Mat = DenseMatrix<S>;
  const Mat id = Mat::Identity(d, d);
  auto factor = [&](std::int64_t i) -> Mat {
    const double t = (static_cast<double>(i) + 0.5) * dt;
    Mat L = lrr_matrix(gamma.eval(t));
    L *= S(dt);
    if (variant == StepVariant::euler) return id + L;
    return L.exp();
  };
  auto combine = [](const Mat& a, const Mat& b) -> Mat { return a * b; };
  const Mat P = kernels::ordered_fold<Mat>(steps, factor, combine, id, exec);
  DenseVector<S> u(d);
  for (int i = 0; i < d; ++i) u[i] = alg->unit_coeffs()[static_cast<std::size_t>(i)];
  OracleResult<S> res;
  res.element = element_from_vector(alg, DenseVector<S>(P * u));
  res.steps = steps;
  res.method = "step-product";
  return res;
}

/// exp(x) through a Pade-with-scaling matrix exponential of L_x, evaluated on
/// the unit's coefficient vector.  Shares no code path with the Taylor
/// exponential in the algebra core.
template <class S>
OracleResult<S> expm_oracle(const Element<S>& x) {
  const DenseMatrix<S> L = lrr_matrix(x);
  const DenseMatrix<S> E = L.exp();
  DenseVector<S> u(x.dim());
  for (int i = 0; i < x.dim(); ++i) u[i] = x.alg->unit_coeffs()[static_cast<std::size_t>(i)];
  OracleResult<S> res;
  res.element = element_from_vector(x.alg, DenseVector<S>(E * u));
  res.steps = 1;
  res.method = "expm";
  return res;
}

/// In a commutative algebra the evolution is t -> exp(integral_0^t gamma);
/// returned as a sampled trajectory with exact derivative samples
/// gamma(t_i)*eta(t_i).
template <class S>
OracleResult<S> commutative_closed_form(const Curve<S>& gamma, int grid = 256) {
  const AlgebraPtr<S> alg = gamma.algebra();
  if (!alg->commutative())
    throw std::invalid_argument("closed-form evolution needs a commutative algebra");
  if (grid < 2) throw std::invalid_argument("grid needs >= 2 points");
  std::vector<std::vector<S>> vals(static_cast<std::size_t>(grid));
  std::vector<std::vector<S>> ders(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid - 1);
    const Element<S> I = gamma.integrate(0.0, t);
    const Element<S> eta = *expm_oracle(I).element;
    vals[static_cast<std::size_t>(i)] = eta.c;
    ders[static_cast<std::size_t>(i)] = mul(gamma.eval(t), eta).c;
  }
  OracleResult<S> res;
  res.curve = Curve<S>::sampled_with_derivative(alg, std::move(vals), std::move(ders));
  res.steps = grid;
  res.method = "commutative-closed-form";
  return res;
}

/// For the constant curve gamma = c the nth series increment is t^n c^n / n!.
template <class S>
OracleResult<S> symbolic_sigma_constant(const Element<S>& c, int n, double t) {
  if (n < 0) throw std::invalid_argument("symbolic_sigma_constant needs n >= 0");
  double coef = 1.0;
  for (int k = 1; k <= n; ++k) coef *= t / static_cast<double>(k);
  OracleResult<S> res;
  res.element = S(coef) * power(c, n);
  res.steps = n;
  res.method = "symbolic-iterated-integral";
  return res;
}

}  // namespace evolab
