#pragma once

// Seminorms on algebra elements, estimation of the product-map norms
// |mu_n|_{p,q} = sup { p(x_1...x_n) : q(x_i) <= 1 }, and growth certificates
// (q, M, r) with |mu_n|_{p,q} <= M^n and r*M < 1.  Such a certificate is what
// turns the evolution series into an a-priori-truncatable object.

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "evolab/algebra.hpp"
#include "evolab/errors.hpp"
#include "evolab/kernels.hpp"

namespace evolab {

enum class NormWhich { one, inf, two };
enum class SubmultStatus { proved, unknown, falsified };

inline const char* which_name(NormWhich w) {
  switch (w) {
    case NormWhich::one: return "one";
    case NormWhich::inf: return "inf";
    case NormWhich::two: return "two";
  }
  return "?";
}

template <class S>
double matrix_operator_norm(const DenseMatrix<S>& A, NormWhich which) {
  if (which == NormWhich::one) {
    double best = 0.0;
    for (int j = 0; j < A.cols(); ++j) {
      double s = 0.0;
      for (int i = 0; i < A.rows(); ++i) s += scalar_abs(A(i, j));
      best = std::max(best, s);
    }
    return best;
  }
  if (which == NormWhich::inf) {
    double best = 0.0;
    for (int i = 0; i < A.rows(); ++i) {
      double s = 0.0;
      for (int j = 0; j < A.cols(); ++j) s += scalar_abs(A(i, j));
      best = std::max(best, s);
    }
    return best;
  }
  if (A.rows() == 0) return 0.0;
  Eigen::JacobiSVD<DenseMatrix<S>> svd(A);
  return svd.singularValues()(0);
}

/// Element coefficients laid out as the n x n matrix they represent.
/// Defined for the builtin matrix and upper-triangular families.
template <class S>
DenseMatrix<S> as_dense_matrix(const Element<S>& x) {
  const auto kind = x.alg->kind();
  const int n = x.alg->param();
  DenseMatrix<S> A = DenseMatrix<S>::Zero(n, n);
  if (kind == AlgebraKind::matrix) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) A(a, b) = x[a * n + b];
  } else if (kind == AlgebraKind::upper_triangular) {
    int i = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) A(a, b) = x[i++];
  } else {
    throw std::invalid_argument("matrix layout only defined for builtin matrix algebras");
  }
  return A;
}

template <class S>
class Seminorm {
 public:
  enum class Form { weighted_coeff, lrr_opnorm, matrix_opnorm, complex_split };

  static Seminorm weighted_coeff(AlgebraPtr<S> a, std::vector<double> weights) {
    if (static_cast<int>(weights.size()) != a->dim())
      throw ParseError("weighted_coeff needs one weight per basis coefficient");
    for (double w : weights)
      if (!(w >= 0.0)) throw ParseError("weighted_coeff weights must be >= 0");
    Seminorm p;
    p.alg_ = std::move(a);
    p.form_ = Form::weighted_coeff;
    p.weights_ = std::move(weights);
    // A diagonal algebra multiplies coordinatewise, and w_i|x_i y_i| <=
    // (w_i|x_i|)(w_i|y_i|) as soon as every weight is >= 1.
    double wmin = std::numeric_limits<double>::infinity();
    for (double w : p.weights_) wmin = std::min(wmin, w);
    p.submult_ = (p.alg_->kind() == AlgebraKind::diagonal && wmin >= 1.0)
                     ? SubmultStatus::proved
                     : SubmultStatus::unknown;
    return p;
  }

  static Seminorm lrr_opnorm(AlgebraPtr<S> a, NormWhich which) {
    Seminorm p;
    p.alg_ = std::move(a);
    p.form_ = Form::lrr_opnorm;
    p.which_ = which;
    // x -> L_x is a unital algebra homomorphism, so any induced matrix norm
    // of L_x is submultiplicative in x.
    p.submult_ = SubmultStatus::proved;
    return p;
  }

  static Seminorm matrix_opnorm(AlgebraPtr<S> a, NormWhich which) {
    if (a->kind() != AlgebraKind::matrix && a->kind() != AlgebraKind::upper_triangular)
      throw ParseError("matrix_opnorm requires a builtin matrix-shaped algebra");
    Seminorm p;
    p.alg_ = std::move(a);
    p.form_ = Form::matrix_opnorm;
    p.which_ = which;
    p.submult_ = SubmultStatus::proved;
    return p;
  }

  /// p~(a+ib) = p(a) + p(b) on the complexification; see complexify_seminorm.
  static Seminorm complex_split(AlgebraPtr<S> a, AlgebraPtr<Real> real_alg,
                                std::shared_ptr<const Seminorm<Real>> inner) {
    static_assert(is_complex_v<S>, "complex_split lives on a complex algebra");
    Seminorm p;
    p.alg_ = std::move(a);
    p.form_ = Form::complex_split;
    p.split_real_alg_ = std::move(real_alg);
    p.split_inner_ = std::move(inner);
    // p~(zw) <= (p(a)+p(b))(p(c)+p(d)) = p~(z)p~(w) by expanding the product
    // into its four real parts, provided the inner seminorm is
    // submultiplicative.
    p.submult_ = p.split_inner_->submult() == SubmultStatus::proved ? SubmultStatus::proved
                                                                    : SubmultStatus::unknown;
    return p;
  }

  double operator()(const Element<S>& x) const {
    if (x.alg.get() != alg_.get()) throw std::invalid_argument("algebra mismatch");
    switch (form_) {
      case Form::weighted_coeff: {
        double m = 0.0;
        for (int i = 0; i < x.dim(); ++i)
          m = std::max(m, weights_[static_cast<std::size_t>(i)] * scalar_abs(x[i]));
        return m;
      }
      case Form::lrr_opnorm:
        return matrix_operator_norm(lrr_matrix(x), which_);
      case Form::matrix_opnorm:
        return matrix_operator_norm(as_dense_matrix(x), which_);
      case Form::complex_split: {
        if constexpr (is_complex_v<S>) {
          Element<Real> re = zero_element(split_real_alg_);
          Element<Real> im = zero_element(split_real_alg_);
          for (int i = 0; i < x.dim(); ++i) {
            re[i] = x[i].real();
            im[i] = x[i].imag();
          }
          return (*split_inner_)(re) + (*split_inner_)(im);
        } else {
          throw std::logic_error("complex_split evaluated on a real algebra");
        }
      }
    }
    return 0.0;
  }

  AlgebraPtr<S> algebra() const { return alg_; }
  Form form() const { return form_; }
  NormWhich which() const { return which_; }
  const std::vector<double>& weights() const { return weights_; }
  SubmultStatus submult() const { return submult_; }
  double unit_value() const { return (*this)(unit_element(alg_)); }
  const std::shared_ptr<const Seminorm<Real>>& split_inner() const { return split_inner_; }
  AlgebraPtr<Real> split_real_algebra() const { return split_real_alg_; }

  Seminorm with_submult(SubmultStatus s) const {
    Seminorm p = *this;
    p.submult_ = s;
    return p;
  }

 private:
  Seminorm() = default;

  AlgebraPtr<S> alg_;
  Form form_ = Form::weighted_coeff;
  NormWhich which_ = NormWhich::one;
  std::vector<double> weights_;
  SubmultStatus submult_ = SubmultStatus::unknown;
  AlgebraPtr<Real> split_real_alg_;
  std::shared_ptr<const Seminorm<Real>> split_inner_;
};

// ---------------------------------------------------------------------------
// Random elements (deterministic per (seed, index) through kernels::indexed_rng)

template <class S>
Element<S> random_gaussian_element(const AlgebraPtr<S>& a, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Element<S> x = zero_element(a);
  for (int i = 0; i < a->dim(); ++i) {
    if constexpr (is_complex_v<S>) {
      const double re = g(rng);
      const double im = g(rng);
      x[i] = Complex(re, im);
    } else {
      x[i] = g(rng);
    }
  }
  return x;
}

/// Random search for q(xy) > q(x)q(y).  Returns the worst offending pair, if
/// any; deterministic in (trials, seed).
template <class S>
std::optional<std::pair<Element<S>, Element<S>>> falsify_submultiplicativity(
    const Seminorm<S>& q, long long trials = 1000, std::uint64_t seed = 0,
    kernels::Exec exec = kernels::Exec::parallel) {
  const AlgebraPtr<S> a = q.algebra();
  auto ratio = [&](std::int64_t i) {
    auto rng = kernels::indexed_rng(seed, static_cast<std::uint64_t>(i), 5);
    const Element<S> x = random_gaussian_element(a, rng);
    const Element<S> y = random_gaussian_element(a, rng);
    const double denom = q(x) * q(y);
    if (denom <= 1e-300) return 0.0;
    return q(mul(x, y)) / denom;
  };
  const auto [best, arg] = kernels::argmax_over(trials, ratio, exec);
  if (best <= 1.0 + 1e-9) return std::nullopt;
  auto rng = kernels::indexed_rng(seed, static_cast<std::uint64_t>(arg), 5);
  Element<S> x = random_gaussian_element(a, rng);
  Element<S> y = random_gaussian_element(a, rng);
  return std::make_pair(std::move(x), std::move(y));
}

// ---------------------------------------------------------------------------
// Provable comparison factors: smallest lambda we can justify with
// p(x) <= lambda * q(x) for all x, or nullopt when no analytic route exists.

template <class S>
double unit_vector_norm(const AlgebraPtr<S>& a, NormWhich which) {
  const auto& u = a->unit_coeffs();
  double one = 0.0, inf = 0.0, two = 0.0;
  for (const auto& v : u) {
    const double m = scalar_abs(v);
    one += m;
    inf = std::max(inf, m);
    two += m * m;
  }
  switch (which) {
    case NormWhich::one: return one;
    case NormWhich::inf: return inf;
    case NormWhich::two: return std::sqrt(two);
  }
  return 0.0;
}

/// ||A||_a <= factor * ||A||_b for d x d matrices (standard induced-norm
/// equivalences: one<->inf cost d, anything vs two costs sqrt(d)).
inline double opnorm_equivalence_factor(NormWhich pa, NormWhich qb, int d) {
  if (pa == qb) return 1.0;
  if (pa == NormWhich::two || qb == NormWhich::two) return std::sqrt(static_cast<double>(d));
  return static_cast<double>(d);
}

template <class S>
std::optional<double> leq_factor(const Seminorm<S>& p, const Seminorm<S>& q) {
  using Form = typename Seminorm<S>::Form;
  if (p.algebra().get() != q.algebra().get()) return std::nullopt;
  const AlgebraPtr<S> a = p.algebra();
  const int dim = a->dim();

  if (p.form() == Form::complex_split && q.form() == Form::complex_split)
    return leq_factor(*p.split_inner(), *q.split_inner());
  if (p.form() == Form::complex_split || q.form() == Form::complex_split) return std::nullopt;

  // On the builtin full matrix algebra (row-major coefficients) L_x = A (x) I,
  // whose induced one/inf/two norms all equal those of A itself; the two
  // operator forms are then interchangeable.
  const bool opnorms_coincide = a->kind() == AlgebraKind::matrix;
  auto effective_form = [&](const Seminorm<S>& s) {
    if (opnorms_coincide && s.form() == Form::matrix_opnorm) return Form::lrr_opnorm;
    return s.form();
  };
  const Form pf = effective_form(p);
  const Form qf = effective_form(q);

  if (pf == Form::weighted_coeff && qf == Form::weighted_coeff) {
    double lam = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double pw = p.weights()[static_cast<std::size_t>(i)];
      const double qw = q.weights()[static_cast<std::size_t>(i)];
      if (pw == 0.0) continue;
      if (qw == 0.0) return std::nullopt;
      lam = std::max(lam, pw / qw);
    }
    return lam;
  }

  if (pf == qf && (pf == Form::lrr_opnorm || pf == Form::matrix_opnorm)) {
    const int d = pf == Form::lrr_opnorm ? dim : a->param();
    return opnorm_equivalence_factor(p.which(), q.which(), d);
  }

  double pmax = 0.0;
  if (pf == Form::weighted_coeff)
    for (double w : p.weights()) pmax = std::max(pmax, w);

  if (pf == Form::weighted_coeff && qf == Form::lrr_opnorm) {
    // L_x 1 = x, so the coefficient vector norm of x is <= q(x)*|unit|; the
    // max-abs coefficient is below every standard vector norm.
    return pmax * unit_vector_norm(a, q.which());
  }
  if (pf == Form::weighted_coeff && qf == Form::matrix_opnorm) {
    // Coefficients are matrix entries, and |a_ij| is below each induced norm.
    return pmax;
  }
  if ((pf == Form::lrr_opnorm || pf == Form::matrix_opnorm) && qf == Form::weighted_coeff) {
    // p(x) <= sum_i |x_i| p(e_i) <= (sum_i p(e_i)/w_i) max_j w_j|x_j|.
    double lam = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double w = q.weights()[static_cast<std::size_t>(i)];
      const double pei = p(basis_element(a, i));
      if (pei == 0.0) continue;
      if (w == 0.0) return std::nullopt;
      lam += pei / w;
    }
    return lam;
  }
  return std::nullopt;
}

/// K with q(xy) <= K q(x) q(y) read off the structure tensor, for positive
/// weighted q.
template <class S>
std::optional<double> tensor_submult_constant(const Seminorm<S>& q) {
  if (q.form() != Seminorm<S>::Form::weighted_coeff) return std::nullopt;
  const AlgebraPtr<S> a = q.algebra();
  const int dim = a->dim();
  for (double w : q.weights())
    if (w <= 0.0) return std::nullopt;
  double K = 0.0;
  for (int k = 0; k < dim; ++k) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        s += scalar_abs(a->structure(i, j, k)) /
             (q.weights()[static_cast<std::size_t>(i)] * q.weights()[static_cast<std::size_t>(j)]);
    K = std::max(K, q.weights()[static_cast<std::size_t>(k)] * s);
  }
  return K;
}

// ---------------------------------------------------------------------------
// |mu_n|_{p,q} estimation

enum class MuNormMode { exact_vertex, sampled, bound };

struct MuNormEstimate {
  int n = 0;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::string method;
  long long samples = 0;
};

struct MuNormOptions {
  long long samples = 10000;
  std::uint64_t seed = 0;
  kernels::Exec exec = kernels::Exec::parallel;
  int vertex_dim_cap = 4;
  int vertex_n_cap = 4;
};

template <class S>
bool exact_vertex_eligible(const Seminorm<S>& q, int n, const MuNormOptions& opts) {
  if constexpr (is_complex_v<S>) {
    return false;  // the complex unit ball is not a polytope
  } else {
    if (q.form() != Seminorm<S>::Form::weighted_coeff) return false;
    for (double w : q.weights())
      if (w <= 0.0) return false;
    return q.algebra()->dim() <= opts.vertex_dim_cap && n <= opts.vertex_n_cap && n >= 1;
  }
}

template <class S>
MuNormEstimate mu_norm(const Seminorm<S>& p, const Seminorm<S>& q, int n, MuNormMode mode,
                       MuNormOptions opts = {}) {
  if (p.algebra().get() != q.algebra().get()) throw std::invalid_argument("algebra mismatch");
  if (n < 1) throw std::invalid_argument("mu_norm needs arity n >= 1");
  const AlgebraPtr<S> a = p.algebra();
  const int dim = a->dim();

  if (mode == MuNormMode::exact_vertex) {
    if constexpr (is_complex_v<S>) {
      throw std::invalid_argument("exact-vertex mode requires a real algebra");
    } else {
      if (!exact_vertex_eligible(q, n, opts))
        throw std::invalid_argument(
            "exact-vertex mode requires positive weighted_coeff q within the dim/arity caps");
      // Ball {q <= 1} is the box |x_i| <= 1/w_i; p(mul_n(...)) is convex in
      // each slot, so the sup over the product of boxes sits on vertex tuples.
      const int bits_per = dim;
      const std::int64_t total = std::int64_t(1) << (bits_per * n);
      std::vector<double> inv_w(static_cast<std::size_t>(dim));
      for (int i = 0; i < dim; ++i) inv_w[static_cast<std::size_t>(i)] = 1.0 / q.weights()[static_cast<std::size_t>(i)];
      const double v = kernels::max_over(
          total,
          [&](std::int64_t code) {
            std::vector<Element<S>> xs;
            xs.reserve(static_cast<std::size_t>(n));
            std::int64_t rem = code;
            for (int s = 0; s < n; ++s) {
              Element<S> x = zero_element(a);
              for (int i = 0; i < dim; ++i) {
                x[i] = (rem & 1) ? inv_w[static_cast<std::size_t>(i)] : -inv_w[static_cast<std::size_t>(i)];
                rem >>= 1;
              }
              xs.push_back(std::move(x));
            }
            return p(mul_n(xs));
          },
          opts.exec);
      return {n, v, v, "exact-vertex", total};
    }
  }

  if (mode == MuNormMode::sampled) {
    if (opts.samples < 1) throw std::invalid_argument("sampled mode needs samples >= 1");
    const double v = kernels::max_over(
        opts.samples,
        [&](std::int64_t idx) {
          auto rng = kernels::indexed_rng(opts.seed, static_cast<std::uint64_t>(idx), 0x11ull);
          std::vector<Element<S>> xs;
          xs.reserve(static_cast<std::size_t>(n));
          for (int s = 0; s < n; ++s) {
            Element<S> g = random_gaussian_element(a, rng);
            const double qn = q(g);
            if (qn <= 1e-300) return 0.0;
            xs.push_back(S(1.0 / qn) * g);
          }
          return p(mul_n(xs));
        },
        opts.exec);
    return {n, std::max(v, 0.0), std::numeric_limits<double>::infinity(), "sampled",
            opts.samples};
  }

  // bound mode: rigorous uppers only.
  const std::optional<double> lam = leq_factor(p, q);
  if (!lam) throw std::invalid_argument("p <= q unverifiable in bound mode");
  if (q.submult() == SubmultStatus::proved) {
    // p(x_1...x_n) <= lambda q(x_1...x_n) <= lambda, and lambda = 1 covers the
    // classical p <= q case.
    return {n, 0.0, *lam, "submultiplicative-bound", 0};
  }
  const std::optional<double> K = tensor_submult_constant(q);
  if (!K) throw std::invalid_argument("p <= q unverifiable in bound mode");
  return {n, 0.0, *lam * std::pow(*K, n - 1), "tensor-bound", 0};
}

/// (n^n/n!) * sampled estimate of |pi_n|_{p,q} = sup p(x^n) on the q-sphere.
/// Diagnostic bound on the symmetrized-product norm; never used in
/// certificates.
template <class S>
double polarization_bound(const Seminorm<S>& p, const Seminorm<S>& q, int n,
                          MuNormOptions opts = {}) {
  if (n < 1 || n > 8) throw std::invalid_argument("polarization_bound needs 1 <= n <= 8");
  if (p.algebra().get() != q.algebra().get()) throw std::invalid_argument("algebra mismatch");
  const AlgebraPtr<S> a = p.algebra();
  const double diag = kernels::max_over(
      opts.samples,
      [&](std::int64_t idx) {
        auto rng = kernels::indexed_rng(opts.seed, static_cast<std::uint64_t>(idx), 0x13ull);
        Element<S> g = random_gaussian_element(a, rng);
        const double qn = q(g);
        if (qn <= 1e-300) return 0.0;
        return p(power(S(1.0 / qn) * g, n));
      },
      opts.exec);
  double factor = 1.0;
  for (int i = 0; i < n; ++i) factor *= static_cast<double>(n) / static_cast<double>(i + 1);
  return factor * std::max(diag, 0.0);
}

// ---------------------------------------------------------------------------
// Certification of the growth condition

template <class S>
struct StarCertificate {
  Seminorm<S> p;
  Seminorm<S> q;
  double M = 0.0;
  double r = 0.5;
  int validated_up_to = 0;  // -1: analytic for every arity
  std::string method;
  int candidate_index = -1;
};

struct CertifyOptions {
  int max_n = 6;
  MuNormOptions mu;
  long long falsify_trials = 1000;
};

inline double certificate_r(double M) { return M < 1.0 ? 0.5 : 1.0 / (2.0 * M); }

template <class S>
StarCertificate<S> certify_star(const Seminorm<S>& p, const std::vector<Seminorm<S>>& candidates,
                                int max_n, CertifyOptions opts = {}) {
  if (max_n < 2) throw std::invalid_argument("certify_star needs max_n >= 2");
  if (candidates.empty()) throw CertificationFailure("no candidate seminorms given");
  std::string reasons;

  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    Seminorm<S> q = candidates[ci];
    if (q.algebra().get() != p.algebra().get()) {
      reasons += " [" + std::to_string(ci) + "] algebra mismatch;";
      continue;
    }
    if (q.submult() == SubmultStatus::unknown) {
      if (falsify_submultiplicativity(q, opts.falsify_trials, opts.mu.seed, opts.mu.exec))
        q = q.with_submult(SubmultStatus::falsified);
    }
    const std::optional<double> lam = leq_factor(p, q);

    if (q.submult() == SubmultStatus::proved && lam && *lam <= 1.0) {
      // p <= q and q submultiplicative force |mu_n|_{p,q} <= 1 for every n.
      return {p, q, 1.0, certificate_r(1.0), -1, "corollary", static_cast<int>(ci)};
    }

    const std::optional<double> K = tensor_submult_constant(q);
    double M = 0.0;
    std::string method;
    bool ok = true;
    for (int n = 1; n <= max_n && ok; ++n) {
      double upper = std::numeric_limits<double>::infinity();
      std::string src;
      if (q.submult() == SubmultStatus::proved && lam && *lam < upper) {
        upper = *lam;
        src = "submultiplicative-bound";
      }
      if (lam && K) {
        const double t = *lam * std::pow(*K, n - 1);
        if (t < upper) {
          upper = t;
          src = "tensor-bound";
        }
      }
      if (exact_vertex_eligible(q, n, opts.mu)) {
        const MuNormEstimate e = mu_norm(p, q, n, MuNormMode::exact_vertex, opts.mu);
        if (e.upper < upper) {
          upper = e.upper;
          src = "exact-vertex";
        }
      }
      if (!std::isfinite(upper)) {
        reasons += " [" + std::to_string(ci) + "] no rigorous upper bound for arity " +
                   std::to_string(n) + ";";
        ok = false;
        break;
      }
      const double needed = upper > 0.0 ? std::pow(upper, 1.0 / n) : 0.0;
      if (needed > M) {
        M = needed;
        method = src;
      }
    }
    if (!ok) continue;
    if (method.empty()) method = "exact-vertex";  // all uppers were zero
    return {p, q, M, certificate_r(M), max_n, method, static_cast<int>(ci)};
  }
  throw CertificationFailure("no candidate certifies:" + reasons);
}

// ---------------------------------------------------------------------------
// Complexification transport

inline Seminorm<Complex> complexify_seminorm(const Seminorm<Real>& p, const Complexification& cx) {
  if (p.algebra().get() != cx.real_algebra.get()) throw std::invalid_argument("algebra mismatch");
  return Seminorm<Complex>::complex_split(cx.algebra, cx.real_algebra,
                                          std::make_shared<Seminorm<Real>>(p));
}

/// Transport a real certificate to the complexification measured with the
/// split surrogates.  The surrogate overestimates the canonical extension by
/// at most a factor 2, so M doubles and everything downstream stays valid.
inline StarCertificate<Complex> complexify_certificate(const StarCertificate<Real>& cert,
                                                       const Complexification& cx) {
  StarCertificate<Complex> out{complexify_seminorm(cert.p, cx), complexify_seminorm(cert.q, cx),
                               2.0 * cert.M,  certificate_r(2.0 * cert.M),
                               cert.validated_up_to, cert.method + "+complexified",
                               cert.candidate_index};
  return out;
}

}  // namespace evolab
