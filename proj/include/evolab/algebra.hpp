#pragma once

// Finite-dimensional unital associative algebras over R or C, presented by a
// structure tensor c with e_i e_j = sum_k c[i][j][k] e_k.  Elements are dense
// coefficient vectors against the basis {e_i}.  The left regular
// representation L_x (matrix of y -> x*y) backs inversion, the exponential and
// the operator seminorms; it is faithful because L_x applied to the unit
// recovers x.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "evolab/errors.hpp"
#include "evolab/kernels.hpp"

namespace evolab {

using Real = double;
using Complex = std::complex<double>;

enum class ScalarField { real, complex };

template <class S>
inline constexpr bool is_complex_v = std::is_same_v<S, Complex>;

template <class S>
constexpr ScalarField field_of() {
  return is_complex_v<S> ? ScalarField::complex : ScalarField::real;
}

inline double scalar_abs(double x) { return std::abs(x); }
inline double scalar_abs(const Complex& x) { return std::abs(x); }

enum class AlgebraKind { matrix, diagonal, upper_triangular, truncated_poly, custom };

inline const char* kind_name(AlgebraKind k) {
  switch (k) {
    case AlgebraKind::matrix: return "matrix";
    case AlgebraKind::diagonal: return "diagonal";
    case AlgebraKind::upper_triangular: return "upper_triangular";
    case AlgebraKind::truncated_poly: return "truncated_poly";
    case AlgebraKind::custom: return "structure_constants";
  }
  return "?";
}

struct AlgebraOptions {
  int max_dim = 64;           // guard against accidental huge tensors
  double check_tol = 1e-12;   // allowed associativity/unit residual
  kernels::Exec exec = kernels::Exec::parallel;
};

template <class S>
class Algebra {
 public:
  using Scalar = S;

  int dim() const { return dim_; }
  ScalarField field() const { return field_of<S>(); }
  AlgebraKind kind() const { return kind_; }
  /// Side parameter of the builtin families (matrix/upper_triangular n,
  /// diagonal d, truncated_poly k); 0 for custom tables.
  int param() const { return param_; }
  bool commutative() const { return commutative_; }
  double assoc_violation() const { return assoc_violation_; }
  double unit_violation() const { return unit_violation_; }

  const S& structure(int i, int j, int k) const {
    return table_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k];
  }
  const std::vector<S>& unit_coeffs() const { return unit_; }

  /// z_k = sum_{i,j} x_i y_j c[i][j][k].
  void mul_into(const std::vector<S>& x, const std::vector<S>& y, std::vector<S>& z) const {
    z.assign(static_cast<std::size_t>(dim_), S(0));
    for (int i = 0; i < dim_; ++i) {
      if (x[static_cast<std::size_t>(i)] == S(0)) continue;
      for (int j = 0; j < dim_; ++j) {
        const S s = x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
        if (s == S(0)) continue;
        const S* row = &table_[(static_cast<std::size_t>(i) * dim_ + j) * dim_];
        for (int k = 0; k < dim_; ++k) z[static_cast<std::size_t>(k)] += s * row[k];
      }
    }
  }

  static std::shared_ptr<const Algebra> matrix(int n, AlgebraOptions opts = {});
  static std::shared_ptr<const Algebra> diagonal(int d, AlgebraOptions opts = {});
  static std::shared_ptr<const Algebra> upper_triangular(int n, AlgebraOptions opts = {});
  static std::shared_ptr<const Algebra> truncated_poly(int k, AlgebraOptions opts = {});
  static std::shared_ptr<const Algebra> from_structure(int dim, std::vector<S> table,
                                                       std::vector<S> unit,
                                                       AlgebraOptions opts = {},
                                                       AlgebraKind kind = AlgebraKind::custom,
                                                       int param = 0);

 private:
  Algebra() = default;

  int dim_ = 0;
  AlgebraKind kind_ = AlgebraKind::custom;
  int param_ = 0;
  std::vector<S> table_;  // flat dim^3, index (i*dim + j)*dim + k
  std::vector<S> unit_;
  bool commutative_ = false;
  double assoc_violation_ = 0.0;
  double unit_violation_ = 0.0;
};

template <class S>
using AlgebraPtr = std::shared_ptr<const Algebra<S>>;

template <class S>
AlgebraPtr<S> Algebra<S>::from_structure(int dim, std::vector<S> table, std::vector<S> unit,
                                         AlgebraOptions opts, AlgebraKind kind, int param) {
  if (dim < 1) throw ParseError("algebra dimension must be positive");
  if (dim > opts.max_dim)
    throw ParseError("algebra dimension " + std::to_string(dim) + " exceeds cap " +
                     std::to_string(opts.max_dim));
  const std::size_t d = static_cast<std::size_t>(dim);
  if (table.size() != d * d * d) throw ParseError("structure table size must be dim^3");
  if (unit.size() != d) throw ParseError("unit coefficient vector size must be dim");

  auto a = std::shared_ptr<Algebra>(new Algebra());
  a->dim_ = dim;
  a->kind_ = kind;
  a->param_ = param;
  a->table_ = std::move(table);
  a->unit_ = std::move(unit);

  // Unit law: 1*e_j = e_j*1 = e_j, coefficientwise.
  double uv = 0.0;
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) {
      S left(0), right(0);
      for (int i = 0; i < dim; ++i) {
        left += a->unit_[static_cast<std::size_t>(i)] * a->structure(i, j, k);
        right += a->unit_[static_cast<std::size_t>(i)] * a->structure(j, i, k);
      }
      const double target = (j == k) ? 1.0 : 0.0;
      uv = std::max(uv, scalar_abs(left - S(target)));
      uv = std::max(uv, scalar_abs(right - S(target)));
    }
  }
  a->unit_violation_ = uv;

  // Associativity residual max_{i,j,l,m} |((e_i e_j) e_l - e_i (e_j e_l))_m|,
  // flattened over (i,j,l); O(dim^5).
  const Algebra* raw = a.get();
  const std::int64_t triples = static_cast<std::int64_t>(dim) * dim * dim;
  a->assoc_violation_ = kernels::max_over(
      triples,
      [raw, dim](std::int64_t t) {
        const int l = static_cast<int>(t % dim);
        const int j = static_cast<int>((t / dim) % dim);
        const int i = static_cast<int>(t / (static_cast<std::int64_t>(dim) * dim));
        double worst = 0.0;
        for (int m = 0; m < dim; ++m) {
          S lhs(0), rhs(0);
          for (int k = 0; k < dim; ++k) {
            lhs += raw->structure(i, j, k) * raw->structure(k, l, m);
            rhs += raw->structure(j, l, k) * raw->structure(i, k, m);
          }
          worst = std::max(worst, scalar_abs(lhs - rhs));
        }
        return worst;
      },
      opts.exec);

  if (a->assoc_violation_ > opts.check_tol) {
    std::ostringstream os;
    os << "structure table is not associative (violation " << a->assoc_violation_ << ")";
    throw ParseError(os.str());
  }
  if (a->unit_violation_ > opts.check_tol) {
    std::ostringstream os;
    os << "declared unit fails the unit law (violation " << a->unit_violation_ << ")";
    throw ParseError(os.str());
  }

  double comm = 0.0;
  for (int i = 0; i < dim && comm <= opts.check_tol; ++i)
    for (int j = 0; j < dim && comm <= opts.check_tol; ++j)
      for (int k = 0; k < dim; ++k)
        comm = std::max(comm, scalar_abs(a->structure(i, j, k) - a->structure(j, i, k)));
  a->commutative_ = comm <= opts.check_tol;
  return a;
}

template <class S>
AlgebraPtr<S> Algebra<S>::matrix(int n, AlgebraOptions opts) {
  if (n < 1) throw ParseError("matrix algebra needs n >= 1");
  const int dim = n * n;
  if (dim > opts.max_dim) throw ParseError("matrix algebra n too large for dim cap");
  // Basis E_{ab} at index a*n + b; E_{ab} E_{cd} = delta_{bc} E_{ad}.
  std::vector<S> table(static_cast<std::size_t>(dim) * dim * dim, S(0));
  auto at = [&](int i, int j, int k) -> S& {
    return table[(static_cast<std::size_t>(i) * dim + j) * dim + k];
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d2 = 0; d2 < n; ++d2) at(a * n + b, b * n + d2, a * n + d2) = S(1);
  std::vector<S> unit(static_cast<std::size_t>(dim), S(0));
  for (int a = 0; a < n; ++a) unit[static_cast<std::size_t>(a * n + a)] = S(1);
  return from_structure(dim, std::move(table), std::move(unit), opts, AlgebraKind::matrix, n);
}

template <class S>
AlgebraPtr<S> Algebra<S>::diagonal(int d, AlgebraOptions opts) {
  if (d < 1) throw ParseError("diagonal algebra needs d >= 1");
  if (d > opts.max_dim) throw ParseError("diagonal algebra d too large for dim cap");
  std::vector<S> table(static_cast<std::size_t>(d) * d * d, S(0));
  for (int i = 0; i < d; ++i)
    table[(static_cast<std::size_t>(i) * d + i) * d + i] = S(1);
  std::vector<S> unit(static_cast<std::size_t>(d), S(1));
  return from_structure(d, std::move(table), std::move(unit), opts, AlgebraKind::diagonal, d);
}

template <class S>
AlgebraPtr<S> Algebra<S>::upper_triangular(int n, AlgebraOptions opts) {
  if (n < 1) throw ParseError("upper triangular algebra needs n >= 1");
  const int dim = n * (n + 1) / 2;
  if (dim > opts.max_dim) throw ParseError("upper triangular algebra n too large for dim cap");
  // Basis E_{ab}, a <= b, enumerated row-major.
  std::vector<int> idx(static_cast<std::size_t>(n) * n, -1);
  int next = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) idx[static_cast<std::size_t>(a) * n + b] = next++;
  std::vector<S> table(static_cast<std::size_t>(dim) * dim * dim, S(0));
  auto at = [&](int i, int j, int k) -> S& {
    return table[(static_cast<std::size_t>(i) * dim + j) * dim + k];
  };
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int d2 = b; d2 < n; ++d2)
        at(idx[static_cast<std::size_t>(a) * n + b], idx[static_cast<std::size_t>(b) * n + d2],
           idx[static_cast<std::size_t>(a) * n + d2]) = S(1);
  std::vector<S> unit(static_cast<std::size_t>(dim), S(0));
  for (int a = 0; a < n; ++a) unit[static_cast<std::size_t>(idx[static_cast<std::size_t>(a) * n + a])] = S(1);
  return from_structure(dim, std::move(table), std::move(unit), opts,
                        AlgebraKind::upper_triangular, n);
}

template <class S>
AlgebraPtr<S> Algebra<S>::truncated_poly(int k, AlgebraOptions opts) {
  if (k < 1) throw ParseError("truncated polynomial algebra needs k >= 1");
  if (k > opts.max_dim) throw ParseError("truncated polynomial algebra k too large for dim cap");
  // Basis 1, x, ..., x^{k-1}; x^i x^j = x^{i+j} truncated at degree k.
  std::vector<S> table(static_cast<std::size_t>(k) * k * k, S(0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k - i; ++j)
      table[(static_cast<std::size_t>(i) * k + j) * k + (i + j)] = S(1);
  std::vector<S> unit(static_cast<std::size_t>(k), S(0));
  unit[0] = S(1);
  return from_structure(k, std::move(table), std::move(unit), opts, AlgebraKind::truncated_poly,
                        k);
}

// ---------------------------------------------------------------------------
// Elements

template <class S>
struct Element {
  AlgebraPtr<S> alg;
  std::vector<S> c;

  const S& operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  S& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  int dim() const { return alg ? alg->dim() : 0; }
};

template <class S>
Element<S> zero_element(const AlgebraPtr<S>& a) {
  return {a, std::vector<S>(static_cast<std::size_t>(a->dim()), S(0))};
}

template <class S>
Element<S> unit_element(const AlgebraPtr<S>& a) {
  return {a, a->unit_coeffs()};
}

template <class S>
Element<S> basis_element(const AlgebraPtr<S>& a, int i) {
  auto e = zero_element(a);
  e[i] = S(1);
  return e;
}

template <class S>
Element<S> make_element(const AlgebraPtr<S>& a, std::vector<S> coeffs) {
  if (static_cast<int>(coeffs.size()) != a->dim())
    throw ParseError("element coefficient count does not match algebra dimension");
  return {a, std::move(coeffs)};
}

template <class S>
void require_same_algebra(const Element<S>& x, const Element<S>& y) {
  if (x.alg.get() != y.alg.get()) throw std::invalid_argument("algebra mismatch");
}

template <class S>
Element<S> operator+(const Element<S>& x, const Element<S>& y) {
  require_same_algebra(x, y);
  Element<S> z = x;
  for (int i = 0; i < z.dim(); ++i) z[i] += y[i];
  return z;
}

template <class S>
Element<S> operator-(const Element<S>& x, const Element<S>& y) {
  require_same_algebra(x, y);
  Element<S> z = x;
  for (int i = 0; i < z.dim(); ++i) z[i] -= y[i];
  return z;
}

template <class S>
Element<S> operator*(const S& s, const Element<S>& x) {
  Element<S> z = x;
  for (auto& v : z.c) v *= s;
  return z;
}

template <class S>
Element<S> operator*(const Element<S>& x, const S& s) {
  return s * x;
}

inline Element<Complex> operator*(double s, const Element<Complex>& x) {
  return Complex(s, 0.0) * x;
}

template <class S>
Element<S> mul(const Element<S>& x, const Element<S>& y) {
  require_same_algebra(x, y);
  Element<S> z;
  z.alg = x.alg;
  x.alg->mul_into(x.c, y.c, z.c);
  return z;
}

/// Left-to-right fold; empty product is the unit, so mu_k acts like mu_n with
/// leading slots filled by 1.
template <class S>
Element<S> mul_n(const std::vector<Element<S>>& xs) {
  if (xs.empty()) throw std::invalid_argument("mul_n needs at least one factor");
  Element<S> acc = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) acc = mul(acc, xs[i]);
  return acc;
}

template <class S>
Element<S> power(const Element<S>& x, int n) {
  if (n < 0) throw std::invalid_argument("power needs n >= 0");
  Element<S> acc = unit_element(x.alg);
  for (int i = 0; i < n; ++i) acc = mul(acc, x);
  return acc;
}

/// Symmetrized product: average of mul_n over all orderings.  Factorial cost,
/// so the arity is capped.
template <class S>
Element<S> sym_mul(const std::vector<Element<S>>& xs, int cap = 8) {
  if (xs.empty()) throw std::invalid_argument("sym_mul needs at least one factor");
  if (static_cast<int>(xs.size()) > cap)
    throw std::invalid_argument("sym_mul arity exceeds cap " + std::to_string(cap));
  std::vector<int> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  Element<S> acc = zero_element(xs.front().alg);
  std::vector<Element<S>> perm(xs.size(), xs.front());
  std::size_t count = 0;
  do {
    for (std::size_t i = 0; i < xs.size(); ++i) perm[i] = xs[static_cast<std::size_t>(idx[i])];
    acc = acc + mul_n(perm);
    ++count;
  } while (std::next_permutation(idx.begin(), idx.end()));
  const double inv = 1.0 / static_cast<double>(count);
  return S(inv) * acc;
}

template <class S>
double coeff_inf_norm(const Element<S>& x) {
  double m = 0.0;
  for (const auto& v : x.c) m = std::max(m, scalar_abs(v));
  return m;
}

template <class S>
double coeff_inf_distance(const Element<S>& x, const Element<S>& y) {
  require_same_algebra(x, y);
  double m = 0.0;
  for (int i = 0; i < x.dim(); ++i) m = std::max(m, scalar_abs(x[i] - y[i]));
  return m;
}

// ---------------------------------------------------------------------------
// Left regular representation and the operations built on it

template <class S>
using DenseMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using DenseVector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// L(k, j) = sum_i x_i c[i][j][k], the matrix of y -> x*y in the basis.
template <class S>
DenseMatrix<S> lrr_matrix(const Element<S>& x) {
  const int d = x.dim();
  DenseMatrix<S> L = DenseMatrix<S>::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    if (x[i] == S(0)) continue;
    for (int j = 0; j < d; ++j) {
      const S* row = &x.alg->structure(i, j, 0);
      for (int k = 0; k < d; ++k) L(k, j) += x[i] * row[k];
    }
  }
  return L;
}

template <class S>
DenseVector<S> coeff_vector(const Element<S>& x) {
  DenseVector<S> v(x.dim());
  for (int i = 0; i < x.dim(); ++i) v(i) = x[i];
  return v;
}

template <class S>
Element<S> element_from_vector(const AlgebraPtr<S>& a, const DenseVector<S>& v) {
  Element<S> x = zero_element(a);
  for (int i = 0; i < a->dim(); ++i) x[i] = v(i);
  return x;
}

/// Smallest/largest singular value ratio of L_x; 0 means numerically singular.
template <class S>
double invert_witness(const Element<S>& x) {
  Eigen::JacobiSVD<DenseMatrix<S>> svd(lrr_matrix(x));
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

template <class S>
std::optional<Element<S>> try_invert(const Element<S>& x, double verify_tol = 1e-10) {
  const DenseMatrix<S> L = lrr_matrix(x);
  Eigen::FullPivLU<DenseMatrix<S>> lu(L);
  if (!lu.isInvertible()) return std::nullopt;
  const DenseVector<S> u = coeff_vector(unit_element(x.alg));
  Element<S> inv = element_from_vector(x.alg, lu.solve(u).eval());
  const Element<S> one = unit_element(x.alg);
  if (coeff_inf_distance(mul(x, inv), one) > verify_tol) return std::nullopt;
  if (coeff_inf_distance(mul(inv, x), one) > verify_tol) return std::nullopt;
  return inv;
}

/// Solve L_x v = 1 and verify x*v = v*x = 1 to verify_tol.
template <class S>
Element<S> invert(const Element<S>& x, double verify_tol = 1e-10) {
  auto inv = try_invert(x, verify_tol);
  if (!inv) throw NumericalBreakdown("singular element: no two-sided inverse to tolerance");
  return *inv;
}

/// Scaling-and-squaring exponential with a truncated power series core run at
/// argument norm <= 1/2.  Independent implementations (spectral route on L_x)
/// cross-check this in the test suite.
template <class S>
Element<S> exp_element(const Element<S>& x) {
  double a = 0.0;
  {
    const DenseMatrix<S> L = lrr_matrix(x);
    for (int j = 0; j < L.cols(); ++j) {
      double col = 0.0;
      for (int i = 0; i < L.rows(); ++i) col += scalar_abs(L(i, j));
      a = std::max(a, col);
    }
  }
  int s = 0;
  while (a > 0.5 && s < 64) {
    a *= 0.5;
    ++s;
  }
  Element<S> y = std::ldexp(1.0, -s) * x;
  Element<S> term = unit_element(x.alg);
  Element<S> sum = term;
  for (int k = 1; k <= 64; ++k) {
    term = mul(term, y);
    term = (1.0 / static_cast<double>(k)) * term;
    sum = sum + term;
    if (coeff_inf_norm(term) <= 0x1p-60 * std::max(1.0, coeff_inf_norm(sum))) break;
  }
  for (int i = 0; i < s; ++i) sum = mul(sum, sum);
  return sum;
}

// ---------------------------------------------------------------------------
// Complexification

/// Same structure tensor read over C; embed/re/im relate A and A_C
/// coefficientwise.
struct Complexification {
  AlgebraPtr<Real> real_algebra;
  AlgebraPtr<Complex> algebra;

  Element<Complex> embed(const Element<Real>& x) const {
    if (x.alg.get() != real_algebra.get()) throw std::invalid_argument("algebra mismatch");
    Element<Complex> z = zero_element(algebra);
    for (int i = 0; i < x.dim(); ++i) z[i] = Complex(x[i], 0.0);
    return z;
  }
  Element<Real> real_part(const Element<Complex>& z) const {
    if (z.alg.get() != algebra.get()) throw std::invalid_argument("algebra mismatch");
    Element<Real> x = zero_element(real_algebra);
    for (int i = 0; i < z.dim(); ++i) x[i] = z[i].real();
    return x;
  }
  Element<Real> imag_part(const Element<Complex>& z) const {
    if (z.alg.get() != algebra.get()) throw std::invalid_argument("algebra mismatch");
    Element<Real> x = zero_element(real_algebra);
    for (int i = 0; i < z.dim(); ++i) x[i] = z[i].imag();
    return x;
  }
};

template <class S>
Complexification complexify(const AlgebraPtr<S>& a, AlgebraOptions opts = {}) {
  if constexpr (is_complex_v<S>) {
    throw std::invalid_argument("input algebra is already complex");
  } else {
    const int d = a->dim();
    std::vector<Complex> table(static_cast<std::size_t>(d) * d * d);
    for (std::size_t t = 0; t < table.size(); ++t) {
      const int k = static_cast<int>(t % static_cast<std::size_t>(d));
      const int j = static_cast<int>((t / static_cast<std::size_t>(d)) % static_cast<std::size_t>(d));
      const int i = static_cast<int>(t / (static_cast<std::size_t>(d) * d));
      table[t] = Complex(a->structure(i, j, k), 0.0);
    }
    std::vector<Complex> unit(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) unit[static_cast<std::size_t>(i)] = Complex(a->unit_coeffs()[static_cast<std::size_t>(i)], 0.0);
    opts.max_dim = std::max(opts.max_dim, d);
    Complexification cx;
    cx.real_algebra = a;
    cx.algebra = Algebra<Complex>::from_structure(d, std::move(table), std::move(unit), opts,
                                                  a->kind(), a->param());
    return cx;
  }
}

}  // namespace evolab
