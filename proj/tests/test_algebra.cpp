#include <cmath>
#include <vector>

#include "doctest.h"

#include "evolab/algebra.hpp"
#include "support.hpp"

using namespace evolab;
using testsup::dense_of;
using testsup::random_element;

TEST_SUITE("algebra") {

TEST_CASE("matrix units multiply by the delta rule") {
  auto a = Algebra<Real>::matrix(2);
  // basis index of E_{rc} is r*2 + c
  const auto E01 = basis_element(a, 1);
  const auto E10 = basis_element(a, 2);
  CHECK(coeff_inf_distance(mul(E01, E10), basis_element(a, 0)) == 0.0);
  CHECK(coeff_inf_distance(mul(E10, E01), basis_element(a, 3)) == 0.0);
  CHECK(coeff_inf_norm(mul(E01, E01)) == 0.0);
}

TEST_CASE("random matrix products match a dense oracle") {
  auto a = Algebra<Real>::matrix(3);
  for (std::uint64_t i = 0; i < 25; ++i) {
    const auto x = random_element(a, 42, 2 * i);
    const auto y = random_element(a, 42, 2 * i + 1);
    const auto z = mul(x, y);
    const Eigen::MatrixXd ref = dense_of(x) * dense_of(y);
    CHECK(coeff_inf_distance(z, testsup::element_of(a, ref)) < 1e-13);
  }
}

TEST_CASE("complex matrix products match a dense complex oracle") {
  auto a = Algebra<Complex>::matrix(2);
  const auto x = testsup::random_element_c(a, 9, 0);
  const auto y = testsup::random_element_c(a, 9, 1);
  const auto z = mul(x, y);
  Eigen::Matrix2cd X, Y;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      X(r, c) = x.c[static_cast<std::size_t>(r * 2 + c)];
      Y(r, c) = y.c[static_cast<std::size_t>(r * 2 + c)];
    }
  const Eigen::Matrix2cd Z = X * Y;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      CHECK(std::abs(z.c[static_cast<std::size_t>(r * 2 + c)] - Z(r, c)) < 1e-13);
}

TEST_CASE("the unit is a two-sided identity in every builtin family") {
  std::vector<AlgebraPtr<Real>> algs = {Algebra<Real>::matrix(3), Algebra<Real>::diagonal(4),
                                        Algebra<Real>::upper_triangular(3),
                                        Algebra<Real>::truncated_poly(4)};
  for (std::size_t k = 0; k < algs.size(); ++k) {
    const auto x = random_element(algs[k], 7, k);
    CHECK(coeff_inf_distance(mul(unit_element(algs[k]), x), x) == 0.0);
    CHECK(coeff_inf_distance(mul(x, unit_element(algs[k])), x) == 0.0);
  }
}

TEST_CASE("commutativity detection") {
  CHECK(Algebra<Real>::diagonal(3)->commutative());
  CHECK(Algebra<Real>::truncated_poly(3)->commutative());
  CHECK_FALSE(Algebra<Real>::matrix(2)->commutative());
  CHECK_FALSE(Algebra<Real>::upper_triangular(2)->commutative());
}

TEST_CASE("truncated polynomials drop powers past the order") {
  auto a = Algebra<Real>::truncated_poly(4);  // basis 1, x, x^2, x^3
  const auto x1 = basis_element(a, 1);
  const auto x2 = basis_element(a, 2);
  CHECK(coeff_inf_distance(mul(x1, x2), basis_element(a, 3)) == 0.0);
  CHECK(coeff_inf_norm(mul(x2, x2)) == 0.0);
  auto a3 = Algebra<Real>::truncated_poly(3);
  CHECK(coeff_inf_norm(mul(basis_element(a3, 2), basis_element(a3, 1))) == 0.0);
}

TEST_CASE("non-associative tables are rejected") {
  // {1, a, b} with a*a = b, a*b = 0, b*a = a, b*b = 0: (aa)a = a but a(aa) = 0.
  const int d = 3;
  std::vector<Real> table(static_cast<std::size_t>(d * d * d), 0.0);
  auto set = [&](int i, int j, int k, double v) {
    table[static_cast<std::size_t>((i * d + j) * d + k)] = v;
  };
  for (int i = 0; i < d; ++i) {
    set(0, i, i, 1.0);
    if (i != 0) set(i, 0, i, 1.0);
  }
  set(1, 1, 2, 1.0);
  set(2, 1, 1, 1.0);
  CHECK_THROWS_AS(Algebra<Real>::from_structure(d, table, {1.0, 0.0, 0.0}), ParseError);
}

TEST_CASE("unit law violations are rejected") {
  const int d = 2;
  std::vector<Real> table(static_cast<std::size_t>(d * d * d), 0.0);
  auto set = [&](int i, int j, int k, double v) {
    table[static_cast<std::size_t>((i * d + j) * d + k)] = v;
  };
  set(0, 0, 0, 1.0);  // 1*1 = 1, but 1*e1 = 0
  set(1, 0, 1, 1.0);
  CHECK_THROWS_AS(Algebra<Real>::from_structure(d, table, {1.0, 0.0}), ParseError);
}

TEST_CASE("valid custom tables pass validation and report kind") {
  // C[x]/(x^2 - x): e1*e1 = e1.
  const int d = 2;
  std::vector<Real> table(static_cast<std::size_t>(d * d * d), 0.0);
  auto set = [&](int i, int j, int k, double v) {
    table[static_cast<std::size_t>((i * d + j) * d + k)] = v;
  };
  set(0, 0, 0, 1.0);
  set(0, 1, 1, 1.0);
  set(1, 0, 1, 1.0);
  set(1, 1, 1, 1.0);
  auto a = Algebra<Real>::from_structure(d, table, {1.0, 0.0});
  CHECK(a->kind() == AlgebraKind::custom);
  CHECK(a->commutative());
  CHECK(a->assoc_violation() == 0.0);
}

TEST_CASE("mul_n folds left and rejects the empty product") {
  auto a = Algebra<Real>::matrix(2);
  const auto x = random_element(a, 3, 0);
  const auto y = random_element(a, 3, 1);
  const auto z = random_element(a, 3, 2);
  CHECK_THROWS_AS(mul_n<Real>({}), std::invalid_argument);
  CHECK(coeff_inf_distance(mul_n<Real>({x}), x) == 0.0);
  CHECK(coeff_inf_distance(mul_n<Real>({x, y, z}), mul(mul(x, y), z)) == 0.0);
}

TEST_CASE("power matches iterated multiplication") {
  auto a = Algebra<Real>::matrix(2);
  const auto x = random_element(a, 4, 0);
  CHECK(coeff_inf_distance(power(x, 0), unit_element(a)) == 0.0);
  CHECK(coeff_inf_distance(power(x, 3), mul(mul(x, x), x)) == 0.0);
  CHECK_THROWS_AS(power(x, -1), std::invalid_argument);
}

TEST_CASE("sym_mul averages over factor orderings") {
  auto a = Algebra<Real>::matrix(2);
  const auto x = random_element(a, 5, 0);
  const auto y = random_element(a, 5, 1);
  const auto want = 0.5 * (mul(x, y) + mul(y, x));
  CHECK(coeff_inf_distance(sym_mul<Real>({x, y}), want) < 1e-14);
  const std::vector<Element<Real>> many(9, x);
  CHECK_THROWS_AS(sym_mul(many), std::invalid_argument);
}

TEST_CASE("exponential of a diagonal element exponentiates entrywise") {
  auto a = Algebra<Real>::diagonal(2);
  const auto x = make_element(a, {std::log(2.0), std::log(3.0)});
  const auto e = exp_element(x);
  CHECK(e[0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(e[1] == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("exponential of a nilpotent is the finite Taylor polynomial") {
  auto a = Algebra<Real>::truncated_poly(3);
  const auto x = basis_element(a, 1);
  const auto e = exp_element(x);
  CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e[2] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(coeff_inf_distance(exp_element(zero_element(a)), unit_element(a)) == 0.0);
}

TEST_CASE("inversion verifies both sides and rejects singular elements") {
  auto d2 = Algebra<Real>::diagonal(2);
  const auto inv = invert(make_element(d2, {2.0, 4.0}));
  CHECK(inv[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(inv[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(invert(make_element(d2, {1.0, 0.0})), NumericalBreakdown);
  CHECK_FALSE(try_invert(make_element(d2, {1.0, 0.0})).has_value());

  auto m2 = Algebra<Real>::matrix(2);
  const auto shear = make_element(m2, {1.0, 1.0, 0.0, 1.0});
  const auto si = invert(shear);
  CHECK(coeff_inf_distance(si, make_element(m2, {1.0, -1.0, 0.0, 1.0})) < 1e-14);

  const auto x = random_element(m2, 6, 0) + 3.0 * unit_element(m2);
  const auto xi = invert(x);
  CHECK(coeff_inf_distance(mul(x, xi), unit_element(m2)) < 1e-12);
  CHECK(coeff_inf_distance(mul(xi, x), unit_element(m2)) < 1e-12);
}

TEST_CASE("invert_witness flags near-singular elements") {
  auto d2 = Algebra<Real>::diagonal(2);
  CHECK(invert_witness(make_element(d2, {1.0, 1e-14})) < 1e-12);
  CHECK(invert_witness(unit_element(d2)) == doctest::Approx(1.0));
}

TEST_CASE("the left regular representation is faithful on products") {
  for (auto a : {Algebra<Real>::matrix(3), Algebra<Real>::truncated_poly(4)}) {
    const auto x = random_element(a, 8, 0);
    const auto y = random_element(a, 8, 1);
    const DenseVector<Real> v = lrr_matrix(x) * coeff_vector(y);
    CHECK(coeff_inf_distance(element_from_vector(a, v), mul(x, y)) < 1e-13);
    const DenseVector<Real> u = lrr_matrix(x) * coeff_vector(unit_element(a));
    CHECK(coeff_inf_distance(element_from_vector(a, u), x) == 0.0);
  }
}

TEST_CASE("coefficient vector helpers roundtrip") {
  auto a = Algebra<Real>::upper_triangular(3);
  const auto x = random_element(a, 9, 0);
  CHECK(coeff_inf_distance(element_from_vector(a, coeff_vector(x)), x) == 0.0);
}

TEST_CASE("complexification lifts the table and splits back exactly") {
  auto a = Algebra<Real>::matrix(2);
  const Complexification cx = complexify(a);
  CHECK(cx.algebra->dim() == 4);
  CHECK(cx.algebra->kind() == AlgebraKind::matrix);

  const auto x = random_element(a, 10, 0);
  const auto y = random_element(a, 10, 1);
  CHECK(coeff_inf_distance(cx.real_part(cx.embed(x)), x) == 0.0);
  CHECK(coeff_inf_norm(cx.imag_part(cx.embed(x))) == 0.0);
  // embedding is a homomorphism, exactly (imaginary parts are hard zeros)
  const auto zc = mul(cx.embed(x), cx.embed(y));
  CHECK(coeff_inf_distance(cx.real_part(zc), mul(x, y)) == 0.0);
  CHECK(coeff_inf_norm(cx.imag_part(zc)) == 0.0);

  CHECK_THROWS_AS(complexify(Algebra<Complex>::matrix(2)), std::invalid_argument);
}

TEST_CASE("element arithmetic invariants") {
  auto a = Algebra<Real>::matrix(2);
  const auto x = random_element(a, 11, 0);
  const auto y = random_element(a, 11, 1);
  CHECK(coeff_inf_distance((x + y) - y, x) < 1e-15);
  CHECK(coeff_inf_distance(2.0 * x, x + x) == 0.0);
  auto b = Algebra<Real>::matrix(2);
  CHECK_THROWS_AS(mul(x, random_element(b, 11, 2)), std::invalid_argument);
}

TEST_CASE("oversized dimensions are rejected") {
  CHECK_THROWS_AS(Algebra<Real>::matrix(9), ParseError);  // dim 81 > default cap 64
}

}  // TEST_SUITE
