#include <cmath>
#include <vector>

#include "doctest.h"

#include "evolab/oracles.hpp"
#include "evolab/picard.hpp"
#include "support.hpp"

using namespace evolab;
using testsup::linear_curve;
using testsup::random_element;
using testsup::random_linear_curve;
using testsup::random_with_norm;

TEST_SUITE("oracles") {

TEST_CASE("the dense exponential matches closed forms") {
  auto d = Algebra<Real>::diagonal(2);
  const auto ed = expm_oracle(make_element(d, {1.0, 2.0}));
  REQUIRE(ed.element.has_value());
  CHECK(ed.method == "expm");
  CHECK((*ed.element)[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK((*ed.element)[1] == doctest::Approx(std::exp(2.0)).epsilon(1e-12));

  auto t = Algebra<Real>::truncated_poly(2);  // x^2 = 0
  const auto en = expm_oracle(make_element(t, {0.0, 1.0}));
  CHECK((*en.element)[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((*en.element)[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("dense and series exponentials agree on random matrices") {
  auto a = Algebra<Real>::matrix(3);
  const auto p = Seminorm<Real>::matrix_opnorm(a, NormWhich::inf);
  for (int s = 0; s < 10; ++s) {
    const auto x = random_with_norm(a, p, 1.5, 61, s);
    CHECK(p(*expm_oracle(x).element - exp_element(x)) < 1e-10);
  }
}

TEST_CASE("a single Euler step is the midpoint affine map") {
  auto a = Algebra<Real>::diagonal(1);
  const auto gamma = linear_curve(a, zero_element(a), unit_element(a));  // gamma(t) = t
  const auto one = step_product(gamma, 1);
  CHECK(one.steps == 1);
  CHECK(one.method == "step-product");
  CHECK((*one.element)[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(step_product(gamma, 0), std::invalid_argument);
}

TEST_CASE("factors multiply in time order") {
  auto a = Algebra<Real>::matrix(2);
  const auto A = make_element(a, {0.0, 1.0, 1.0, 0.0});
  const auto B = make_element(a, {1.0, 0.0, 0.0, -1.0});
  const auto gamma = Curve<Real>::poly_unchecked(a, {0.0, 0.5, 1.0}, {{A.c}, {B.c}});
  const auto got = *step_product(gamma, 2).element;
  const auto one = unit_element(a);
  const auto want = mul(one + 0.5 * A, one + 0.5 * B);  // dyadic data: exact
  CHECK(coeff_inf_distance(got, want) == 0.0);
  const auto wrong = mul(one + 0.5 * B, one + 0.5 * A);
  CHECK(coeff_inf_distance(got, wrong) > 0.1);
}

TEST_CASE("step products converge at their nominal orders") {
  auto a = Algebra<Real>::matrix(2);
  const auto p = Seminorm<Real>::matrix_opnorm(a, NormWhich::inf);
  const auto cert = certify_star(p, {p}, 6);
  const auto gamma = random_linear_curve(a, p, 1.0, 62, 0);
  const auto ref = evolve(gamma, p, cert, 1e-12).eta.eval(1.0);

  auto err = [&](std::int64_t s, StepVariant v) {
    return p(*step_product(gamma, s, v).element - ref);
  };
  for (std::int64_t s : {256, 512}) {
    const double ratio = err(s, StepVariant::euler) / err(2 * s, StepVariant::euler);
    CHECK(ratio > 1.7);
    CHECK(ratio < 2.3);
  }
  for (std::int64_t s : {64, 128}) {
    const double ratio = err(s, StepVariant::exponential) / err(2 * s, StepVariant::exponential);
    CHECK(ratio > 3.4);
    CHECK(ratio < 4.6);
  }
  CHECK(err(4096, StepVariant::exponential) < 1e-6);
}

TEST_CASE("the closed form for commuting coefficients tracks the iteration") {
  auto a = Algebra<Real>::diagonal(3);
  const auto p = Seminorm<Real>::weighted_coeff(a, {1.0, 1.0, 1.0});
  const auto cert = certify_star(p, {p}, 6);
  const auto gamma = random_linear_curve(a, p, 1.0, 63, 0);
  const auto res = evolve(gamma, p, cert, 1e-10);
  const auto closed = commutative_closed_form(gamma, 257);
  REQUIRE(closed.curve.has_value());
  CHECK(closed.method == "commutative-closed-form");
  CHECK(testsup::sup_distance(*closed.curve, res.eta, p, 257) < 1e-8);

  auto m = Algebra<Real>::matrix(2);
  const auto noncomm = Curve<Real>::constant(random_element(m, 63, 1));
  CHECK_THROWS_AS(commutative_closed_form(noncomm), std::invalid_argument);
}

TEST_CASE("symbolic increments of a constant coefficient") {
  auto a = Algebra<Real>::matrix(2);
  const auto c = random_element(a, 64, 0);
  const auto s0 = symbolic_sigma_constant(c, 0, 0.7);
  CHECK(coeff_inf_distance(*s0.element, unit_element(a)) == 0.0);
  const auto s2 = symbolic_sigma_constant(c, 2, 1.0);
  CHECK(coeff_inf_distance(*s2.element, 0.5 * mul(c, c)) < 1e-14);
  const auto sigma = dyson_term(Curve<Real>::constant(c), 2);
  CHECK(coeff_inf_distance(*s2.element, sigma.eval(1.0)) < 1e-14);
  CHECK_THROWS_AS(symbolic_sigma_constant(c, -1, 0.5), std::invalid_argument);
}

}  // TEST_SUITE
