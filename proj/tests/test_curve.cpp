#include <cmath>
#include <vector>

#include "doctest.h"

#include "evolab/curve.hpp"
#include "support.hpp"

using namespace evolab;
using testsup::linear_curve;
using testsup::random_element;

namespace {

AlgebraPtr<Real> scalar_alg() { return Algebra<Real>::diagonal(1); }

Curve<Real> scalar_poly(const AlgebraPtr<Real>& a, std::vector<double> coeffs) {
  typename Curve<Real>::CellPoly cell;
  for (double c : coeffs) cell.push_back({c});
  return Curve<Real>::poly(a, {0.0, 1.0}, {cell});
}

}  // namespace

TEST_SUITE("curve") {

TEST_CASE("constant curves evaluate, differentiate and integrate trivially") {
  auto a = Algebra<Real>::matrix(2);
  const auto c = random_element(a, 31, 0);
  const auto f = Curve<Real>::constant(c);
  CHECK(coeff_inf_distance(f.eval(0.0), c) == 0.0);
  CHECK(coeff_inf_distance(f.eval(0.73), c) == 0.0);
  CHECK(coeff_inf_norm(f.derivative().eval(0.5)) == 0.0);
  CHECK(coeff_inf_distance(f.integrate(0.0, 1.0), c) < 1e-15);
}

TEST_CASE("a linear ramp hits the pinned endpoint norm") {
  auto a = Algebra<Real>::matrix(2);
  const auto x = random_element(a, 32, 0);
  const auto f = linear_curve(a, zero_element(a), x);  // gamma(t) = t*x
  const auto p = Seminorm<Real>::matrix_opnorm(a, NormWhich::inf);
  CHECK(coeff_inf_distance(f.eval(0.5), 0.5 * x) == 0.0);
  CHECK(curve_norm(f, 0, p) == p(x));  // grid includes t = 1
  CHECK(curve_norm(f, 1, p) == p(x));  // derivative is the constant x
  CHECK(lipschitz_bound(f, p) == p(x));
  CHECK(coeff_inf_distance(f.integrate(0.0, 1.0), 0.5 * x) < 1e-15);
}

TEST_CASE("construction validates breakpoints and continuity") {
  auto a = scalar_alg();
  using CP = Curve<Real>::CellPoly;
  const CP c0{{0.0}};
  const CP c1{{1.0}};
  CHECK_THROWS_AS(Curve<Real>::poly(a, {0.0, 0.5, 1.0}, {c0, c1}), ParseError);  // jump
  CHECK_THROWS_AS(Curve<Real>::poly(a, {0.0, 0.5, 0.5, 1.0}, {c0, c0, c0}), ParseError);
  CHECK_THROWS_AS(Curve<Real>::poly(a, {0.0, 0.9}, {c0}), ParseError);
  CHECK_THROWS_AS(Curve<Real>::poly(a, {0.0, 1.0}, {CP{}}), ParseError);
  CHECK_NOTHROW(Curve<Real>::poly(a, {0.0, 0.5, 1.0}, {c0, c0}));
}

TEST_CASE("evaluation outside the unit interval is rejected") {
  auto a = scalar_alg();
  const auto f = scalar_poly(a, {1.0, 2.0});
  CHECK_THROWS_AS(f.eval(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(f.eval(1.01), std::invalid_argument);
  CHECK(f.eval(1.0)[0] == doctest::Approx(3.0));
}

TEST_CASE("fundamental theorem of calculus on random piecewise polynomials") {
  auto a = Algebra<Real>::diagonal(2);
  // three cells, degree 3, continuous by construction via antiderivative
  const auto base = Curve<Real>::poly(
      a, {0.0, 0.3, 0.7, 1.0},
      {{{0.5, -1.0}, {1.0, 2.0}, {-2.0, 0.5}},
       {{0.5 + 1.0 * 0.3 - 2.0 * 0.09, -1.0 + 2.0 * 0.3 + 0.5 * 0.09}, {2.0, -1.0}, {1.0, 1.0}},
       {{0.5 + 1.0 * 0.3 - 2.0 * 0.09 + 2.0 * 0.4 + 1.0 * 0.16,
         -1.0 + 2.0 * 0.3 + 0.5 * 0.09 - 1.0 * 0.4 + 1.0 * 0.16},
        {0.0, 3.0}}});
  const auto F = base.antiderivative();
  const auto dF = F.derivative();
  for (double t : {0.0, 0.1, 0.3, 0.55, 0.7, 0.99, 1.0})
    CHECK(coeff_inf_distance(dF.eval(t), base.eval(t)) < 1e-12);
  CHECK(coeff_inf_norm(F.eval(0.0)) == 0.0);
  const auto total = base.integrate(0.0, 1.0);
  const auto split = base.integrate(0.0, 0.4) + base.integrate(0.4, 1.0);
  CHECK(coeff_inf_distance(total, split) < 1e-13);
  CHECK_THROWS_AS(base.integrate(0.6, 0.4), std::invalid_argument);
}

TEST_CASE("integration is linear in the curve") {
  auto a = Algebra<Real>::diagonal(2);
  const auto f = linear_curve(a, make_element(a, {1.0, -2.0}), make_element(a, {0.5, 3.0}));
  const auto two_f = 2.0 * f;
  CHECK(coeff_inf_distance(two_f.integrate(0.0, 1.0), 2.0 * f.integrate(0.0, 1.0)) == 0.0);
}

TEST_CASE("polynomial multiplication agrees with pointwise products") {
  auto a = Algebra<Real>::matrix(2);
  const auto f = linear_curve(a, random_element(a, 33, 0), random_element(a, 33, 1));
  const auto g = linear_curve(a, random_element(a, 33, 2), random_element(a, 33, 3));
  const auto h = multiply(f, g);
  CHECK(h.max_degree() == 2);
  for (double t : {0.0, 0.25, 0.6, 1.0})
    CHECK(coeff_inf_distance(h.eval(t), mul(f.eval(t), g.eval(t))) < 1e-13);

  auto s = scalar_alg();
  const auto u = scalar_poly(s, {1.0, 1.0});   // 1 + t
  const auto v = scalar_poly(s, {1.0, -1.0});  // 1 - t
  const auto w = multiply(u, v);               // 1 - t^2
  CHECK(w.eval(0.5)[0] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("addition refines mixed breakpoint grids") {
  auto a = scalar_alg();
  const auto f = Curve<Real>::poly(a, {0.0, 0.5, 1.0}, {{{1.0}, {1.0}}, {{1.5}, {2.0}}});
  const auto g = Curve<Real>::poly(a, {0.0, 0.3, 1.0}, {{{0.5}}, {{0.5}, {0.0}, {3.0}}});
  const auto h = f + g;
  for (double t : {0.0, 0.2, 0.3, 0.44, 0.5, 0.8, 1.0})
    CHECK(h.eval(t)[0] == doctest::Approx(f.eval(t)[0] + g.eval(t)[0]).epsilon(1e-14));
  CHECK(h.cell_count() == 3);
}

TEST_CASE("breakpoint refinement preserves values exactly") {
  auto a = Algebra<Real>::diagonal(2);
  const auto f = linear_curve(a, make_element(a, {1.0, 2.0}), make_element(a, {-0.5, 1.0}));
  const auto g = with_breakpoints(f, {0.0, 0.25, 0.5, 1.0});
  for (double t : {0.0, 0.1, 0.25, 0.49, 0.5, 0.77, 1.0})
    CHECK(coeff_inf_distance(g.eval(t), f.eval(t)) < 1e-15);
}

TEST_CASE("shift_clamp freezes the tail at the final value") {
  auto a = Algebra<Real>::diagonal(1);
  const auto x = make_element(a, {1.0});
  const auto f = linear_curve(a, zero_element(a), x);  // gamma(t) = t
  const auto g = shift_clamp(f, 0.25);
  CHECK(g.eval(0.0)[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.eval(0.5)[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(g.eval(0.9)[0] == doctest::Approx(1.0).epsilon(1e-15));  // clamped past t = 1
  CHECK(g.eval(1.0)[0] == doctest::Approx(1.0).epsilon(1e-15));
  const auto id = shift_clamp(f, 0.0);
  CHECK(id.eval(0.37)[0] == f.eval(0.37)[0]);
}

TEST_CASE("sampled curves interpolate linearly and gate derivatives") {
  auto a = scalar_alg();
  std::vector<std::vector<Real>> vals = {{0.0}, {1.0}, {4.0}};
  const auto f = Curve<Real>::sampled(a, vals);
  CHECK(f.eval(0.25)[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f.eval(0.75)[0] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK_THROWS_AS(f.derivative(), std::invalid_argument);  // smoothness 0
  CHECK_THROWS_AS(Curve<Real>::sampled(a, {{1.0}}), ParseError);
}

TEST_CASE("sampled Simpson integration is exact on cubics with even panels") {
  auto a = scalar_alg();
  const int m = 9;  // 8 panels
  std::vector<std::vector<Real>> vals;
  for (int i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / (m - 1);
    vals.push_back({t * t * t});
  }
  const auto f = Curve<Real>::sampled(a, vals);
  CHECK(f.integrate(0.0, 1.0)[0] == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("sampled integration pads odd panel counts with a trapezoid") {
  auto a = scalar_alg();
  const int m = 10;  // 9 panels: 4 Simpson pairs + 1 trapezoid
  std::vector<std::vector<Real>> vals;
  for (int i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / (m - 1);
    vals.push_back({t * t * t});
  }
  const auto f = Curve<Real>::sampled(a, vals);
  CHECK(f.integrate(0.0, 1.0)[0] == doctest::Approx(0.25).epsilon(5e-3));
}

TEST_CASE("central differences are exact on quadratic samples away from the ends") {
  auto a = scalar_alg();
  const int m = 21;
  std::vector<std::vector<Real>> vals;
  for (int i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / (m - 1);
    vals.push_back({t * t});
  }
  const auto d = Curve<Real>::sampled(a, vals, 1).derivative();
  for (double t : {0.25, 0.5, 0.75})
    CHECK(d.eval(t)[0] == doctest::Approx(2.0 * t).epsilon(1e-12));
}

TEST_CASE("attached derivative samples are consumed verbatim") {
  auto a = scalar_alg();
  std::vector<std::vector<Real>> vals = {{0.0}, {0.5}, {1.0}};
  std::vector<std::vector<Real>> ders = {{7.0}, {8.0}, {9.0}};
  const auto f = Curve<Real>::sampled_with_derivative(a, vals, ders);
  CHECK(f.has_derivative_samples());
  CHECK(f.derivative().eval(0.5)[0] == 8.0);
}

TEST_CASE("re-projection caps the degree, is linear, and pins the left endpoint") {
  auto a = scalar_alg();
  const auto f = scalar_poly(a, {2.0, 0.0, 0.0, 0.0, 0.0, 1.0});  // 2 + t^5
  const auto p = Seminorm<Real>::weighted_coeff(a, {1.0});
  const auto rp = reproject(f, 3, &p);
  CHECK(rp.curve.max_degree() <= 3);
  CHECK(rp.slack_c0 > 0.0);
  CHECK(rp.slack_c0 < 0.05);
  CHECK(rp.curve.eval(0.0)[0] == 2.0);  // exact left endpoint
  // the slack is a grid sup; allow a whisker for off-grid probes
  for (double t : {0.2, 0.5, 0.8, 1.0})
    CHECK(std::abs(rp.curve.eval(t)[0] - f.eval(t)[0]) <= rp.slack_c0 * 1.05 + 1e-12);

  // linearity: scaling by a power of two commutes bitwise
  const auto rp2 = reproject(2.0 * f, 3, &p);
  for (int c = 0; c < rp.curve.cell_count(); ++c) {
    const auto& c1 = rp.curve.cell(c);
    const auto& c2 = rp2.curve.cell(c);
    REQUIRE(c1.size() == c2.size());
    for (std::size_t j = 0; j < c1.size(); ++j)
      CHECK(c2[j][0] == 2.0 * c1[j][0]);
  }

  // below the cap the curve is returned unchanged
  const auto noop = reproject(f, 6, &p);
  CHECK(noop.slack_c0 == 0.0);
  CHECK(noop.curve.max_degree() == 5);
}

TEST_CASE("curve norms support certified inflation on polynomials only") {
  auto a = scalar_alg();
  const auto f = scalar_poly(a, {0.0, 1.0});
  const auto p = Seminorm<Real>::weighted_coeff(a, {1.0});
  const double plain = curve_norm(f, 0, p);
  const double inflated = curve_norm(f, 0, p, {1024, true});
  CHECK(plain == 1.0);
  CHECK(inflated >= plain);
  CHECK(inflated <= plain * 1.01);

  const auto s = Curve<Real>::sampled(a, {{0.0}, {1.0}});
  CHECK(curve_norm(s, 0, p) == 1.0);
  CHECK_THROWS_AS(curve_norm(s, 0, p, {1024, true}), std::invalid_argument);
  CHECK_THROWS_AS(curve_norm(s, 1, p), std::invalid_argument);
}

TEST_CASE("incompatible operands are rejected") {
  auto a = scalar_alg();
  auto b = Algebra<Real>::diagonal(1);
  const auto f = scalar_poly(a, {1.0});
  const auto g = scalar_poly(b, {1.0});
  CHECK_THROWS_AS(f + g, std::invalid_argument);
  const auto s1 = Curve<Real>::sampled(a, {{0.0}, {1.0}});
  CHECK_THROWS_AS(multiply(f, s1), std::invalid_argument);
  const auto s2 = Curve<Real>::sampled(a, {{0.0}, {0.5}, {1.0}});
  CHECK_THROWS_AS(s1 + s2, std::invalid_argument);
}

TEST_CASE("embedding a real curve into the complexification preserves values") {
  auto a = Algebra<Real>::matrix(2);
  const Complexification cx = complexify(a);
  const auto f = linear_curve(a, random_element(a, 34, 0), random_element(a, 34, 1));
  const auto fc = embed_curve(f, cx);
  for (double t : {0.0, 0.5, 1.0}) {
    const auto zc = fc.eval(t);
    const auto x = f.eval(t);
    for (int k = 0; k < 4; ++k) {
      CHECK(zc[k].real() == x[k]);
      CHECK(zc[k].imag() == 0.0);
    }
  }
}

}  // TEST_SUITE
