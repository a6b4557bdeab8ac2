#pragma once

// Picard iteration for eta'(t) = eta(t) gamma(t), eta(0) = 1, with a-priori
// truncation depth read off a growth certificate.  The nth increment
// sigma_n = eta_n - eta_{n-1} obeys |sigma_n|_{C1,p} <= M^n R^n/(n-1)! with
// R = |gamma|_{C0,q}, so the series tail below depth N is bounded by
// sum_{n>N} (MR)^n/(n-1)! — computable in closed form and monotone in N.
// Everything here is measured after the fact: the ODE residual and the
// invertibility of the trajectory are verified on a grid, and degree-cap
// re-projection error is accumulated into a reported slack.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evolab/algebra.hpp"
#include "evolab/curve.hpp"
#include "evolab/errors.hpp"
#include "evolab/kernels.hpp"
#include "evolab/seminorm.hpp"

namespace evolab {

// ---------------------------------------------------------------------------
// Tail bounds

namespace detail {

/// Upper bound for E_N(x) = sum_{m>=N} x^m/m!: partial sum plus a geometric
/// closure once the term ratio x/(m+1) drops below 1/2.
inline double exp_tail_upper(double x, int N) {
  if (x == 0.0) return N == 0 ? 1.0 : 0.0;
  double term = 1.0;
  for (int m = 1; m <= N; ++m) term *= x / static_cast<double>(m);
  double sum = 0.0;
  int m = N;
  for (int guard = 0; guard < 4000; ++guard) {
    sum += term;
    term *= x / static_cast<double>(m + 1);
    ++m;
    if (static_cast<double>(m + 1) > 2.0 * x && term <= 1e-18 * sum) break;
  }
  const double rho = x / static_cast<double>(m + 1);
  return rho < 1.0 ? sum + term / (1.0 - rho) : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Rigorous upper bound for sum_{n>N} M^n R^n/(n-1)! = x * E_N(x), x = M*R.
/// Decreasing in N; at N=0 it is M*R*e^{M*R}.
inline double remainder_bound(double M, double R, int N) {
  if (M < 0.0 || R < 0.0 || N < 0) throw std::invalid_argument("remainder_bound needs M, R, N >= 0");
  const double x = M * R;
  if (x == 0.0) return 0.0;
  return x * detail::exp_tail_upper(x, N);
}

template <class S>
double remainder_bound(const StarCertificate<S>& cert, double R, int N) {
  return remainder_bound(cert.M, R, N);
}

/// Tail of the directional-derivative series: sum_{n>N} n M^n R^{n-1} D/(n-1)!
/// = M*D*(x*E_{max(N-1,0)}(x) + E_N(x)).
inline double gateaux_tail_bound(double M, double R, double D, int N) {
  if (M < 0.0 || R < 0.0 || D < 0.0 || N < 0)
    throw std::invalid_argument("gateaux_tail_bound needs nonnegative inputs");
  if (M == 0.0 || D == 0.0) return 0.0;
  const double x = M * R;
  return M * D * (x * detail::exp_tail_upper(x, std::max(N - 1, 0)) + detail::exp_tail_upper(x, N));
}

template <class S>
int choose_depth(const StarCertificate<S>& cert, double R, double tol, int depth_cap = 60) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  for (int N = 0; N <= depth_cap; ++N)
    if (remainder_bound(cert.M, R, N) <= tol) return N;
  throw DepthCapExceeded("tolerance unreachable within depth cap " + std::to_string(depth_cap));
}

// ---------------------------------------------------------------------------
// Iteration state

template <class S>
struct PicardState {
  Curve<S> gamma;
  std::vector<Curve<S>> iterates;  // eta_0 ... eta_N
  int degree_cap = 16;
  double slack = 0.0;  // accumulated re-projection / quadrature error estimate
  std::optional<Seminorm<S>> measure;

  int depth() const { return static_cast<int>(iterates.size()) - 1; }
};

namespace detail {

template <class S>
Curve<S> constant_like(const Curve<S>& shape, const Element<S>& value, bool with_derivs) {
  if (shape.rep() == Curve<S>::Rep::poly) return Curve<S>::constant(value);
  std::vector<std::vector<S>> vals(shape.sample_values().size(), value.c);
  if (!with_derivs) return Curve<S>::sampled(shape.algebra(), std::move(vals), 1);
  std::vector<std::vector<S>> zero(shape.sample_values().size(),
                                   std::vector<S>(value.c.size(), S(0)));
  return Curve<S>::sampled_with_derivative(shape.algebra(), std::move(vals), std::move(zero));
}

/// t -> integral_0^t f, with the quadrature slack estimate for sampled curves
/// (max discrepancy between the Simpson-with-pad and trapezoid prefixes).
template <class S>
std::pair<Curve<S>, double> cumulative_integral(const Curve<S>& f,
                                                const std::optional<Seminorm<S>>& measure,
                                                bool attach_derivative) {
  if (f.rep() == Curve<S>::Rep::poly) return {f.antiderivative(), 0.0};
  const auto& v = f.sample_values();
  const std::size_t m = v.size();
  const std::size_t dim = v[0].size();
  const double h = 1.0 / static_cast<double>(m - 1);
  std::vector<std::vector<S>> Fs(m, std::vector<S>(dim, S(0)));
  std::vector<std::vector<S>> Ft(m, std::vector<S>(dim, S(0)));
  for (std::size_t i = 1; i < m; ++i)
    for (std::size_t k = 0; k < dim; ++k)
      Ft[i][k] = Ft[i - 1][k] + S(0.5 * h) * (v[i - 1][k] + v[i][k]);
  for (std::size_t i = 1; i < m; ++i) {
    if (i % 2 == 0) {
      for (std::size_t k = 0; k < dim; ++k)
        Fs[i][k] = Fs[i - 2][k] + S(h / 3.0) * (v[i - 2][k] + S(4) * v[i - 1][k] + v[i][k]);
    } else {
      for (std::size_t k = 0; k < dim; ++k)
        Fs[i][k] = Fs[i - 1][k] + S(0.5 * h) * (v[i - 1][k] + v[i][k]);
    }
  }
  double slack = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<S> diff(dim);
    for (std::size_t k = 0; k < dim; ++k) diff[k] = Fs[i][k] - Ft[i][k];
    Element<S> e{f.algebra(), std::move(diff)};
    slack = std::max(slack, measure ? (*measure)(e) : coeff_inf_norm(e));
  }
  Curve<S> F = attach_derivative
                   ? Curve<S>::sampled_with_derivative(f.algebra(), std::move(Fs), v)
                   : Curve<S>::sampled(f.algebra(), std::move(Fs), 1);
  return {F, slack};
}

}  // namespace detail

template <class S>
PicardState<S> make_picard_state(Curve<S> gamma, std::optional<Seminorm<S>> measure = std::nullopt,
                                 int degree_cap = 16) {
  PicardState<S> st{std::move(gamma), {}, degree_cap, 0.0, std::move(measure)};
  st.iterates.push_back(
      detail::constant_like(st.gamma, unit_element(st.gamma.algebra()), true));
  return st;
}

/// Append eta_{N+1} = 1 + integral_0^t eta_N gamma.  Polynomial mode is exact
/// up to the degree cap; over-degree cells are least-squares re-projected and
/// the measured C0+C1 error goes into the slack.
template <class S>
PicardState<S> picard_step(const PicardState<S>& state) {
  if (state.iterates.empty()) throw std::invalid_argument("uninitialized iteration state");
  PicardState<S> next = state;
  const Curve<S>& eta = state.iterates.back();
  if (eta.rep() != state.gamma.rep()) throw std::invalid_argument("representation mismatch");
  const Curve<S> prod = multiply(eta, state.gamma);
  auto [integ, qslack] = detail::cumulative_integral(prod, state.measure, true);
  next.slack += qslack;
  Curve<S> fresh = integ + detail::constant_like(state.gamma, unit_element(state.gamma.algebra()),
                                                 true);
  if (fresh.rep() == Curve<S>::Rep::poly && fresh.max_degree() > state.degree_cap) {
    const Seminorm<S>* m = state.measure ? &*state.measure : nullptr;
    Reprojected<S> rp = reproject(fresh, state.degree_cap, m);
    next.slack += rp.slack_c0 + rp.slack_c1;
    fresh = std::move(rp.curve);
  }
  next.iterates.push_back(std::move(fresh));
  return next;
}

/// sigma_n = eta_n - eta_{n-1} through its own recursion sigma_n = integral
/// sigma_{n-1} gamma; homogeneous of degree n in gamma (exactly, the degree
/// cap projection being linear).
template <class S>
Curve<S> dyson_term(const Curve<S>& gamma, int n, int degree_cap = 16,
                    const Seminorm<S>* measure = nullptr) {
  if (n < 1) throw std::invalid_argument("dyson_term needs n >= 1");
  std::optional<Seminorm<S>> meas;
  if (measure) meas = *measure;
  Curve<S> sigma = detail::cumulative_integral(gamma, meas, false).first;
  for (int k = 2; k <= n; ++k) {
    sigma = detail::cumulative_integral(multiply(sigma, gamma), meas, false).first;
    if (sigma.rep() == Curve<S>::Rep::poly && sigma.max_degree() > degree_cap)
      sigma = reproject(sigma, degree_cap, measure).curve;
  }
  return sigma;
}

/// Multilinear iterated integral tau(g_1,...,g_n)(t), innermost slot first.
template <class S>
Curve<S> tau(const std::vector<Curve<S>>& gs, int degree_cap = 16,
             const Seminorm<S>* measure = nullptr) {
  if (gs.empty()) throw std::invalid_argument("tau needs at least one curve");
  std::optional<Seminorm<S>> meas;
  if (measure) meas = *measure;
  Curve<S> acc = detail::cumulative_integral(gs.front(), meas, false).first;
  for (std::size_t k = 1; k < gs.size(); ++k) {
    acc = detail::cumulative_integral(multiply(acc, gs[k]), meas, false).first;
    if (acc.rep() == Curve<S>::Rep::poly && acc.max_degree() > degree_cap)
      acc = reproject(acc, degree_cap, measure).curve;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Evolution

struct EvolveOptions {
  int grid = 256;      // residual / invertibility check grid (and CSV rows)
  int degree_cap = 16;
  int depth_cap = 60;
  kernels::Exec exec = kernels::Exec::parallel;
};

template <class S>
struct EvolutionResult {
  Curve<S> eta;
  int depth_used;
  double M;
  double R;           // |gamma|_{C0,q}, inflated to a certified upper bound on
                      // polynomial curves
  double tail_bound;  // remainder_bound(M, R, depth_used)
  double residual;    // max grid p(eta' - eta*gamma)
  double slack;
  double invertibility_witness;  // min grid rcond of L_{eta(t)}
  bool certified;                // polynomial path with rigorous bookkeeping
  double imag_residue;           // complexified runs: max grid |Im coeff|
  Seminorm<S> p;
  Seminorm<S> q;
};

template <class S>
EvolutionResult<S> evolve(const Curve<S>& gamma, const Seminorm<S>& p,
                          const StarCertificate<S>& cert, double tol = 1e-10,
                          EvolveOptions opts = {}) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (opts.grid < 2) throw std::invalid_argument("check grid needs >= 2 points");
  const AlgebraPtr<S> alg = gamma.algebra();
  if (alg.get() != p.algebra().get() || alg.get() != cert.q.algebra().get())
    throw std::invalid_argument("algebra mismatch between curve, seminorm and certificate");
  if (!(cert.M >= 0.0) || !(cert.r > 0.0) || cert.r * cert.M >= 1.0)
    throw CertificationFailure("certificate does not witness a summable series");

  const bool certified = gamma.rep() == Curve<S>::Rep::poly;
  const double R = curve_norm(gamma, 0, cert.q, {1024, certified}, opts.exec);
  const int N = choose_depth(cert, R, tol, opts.depth_cap);

  PicardState<S> st = make_picard_state(gamma, std::optional<Seminorm<S>>(p), opts.degree_cap);
  for (int k = 0; k < N; ++k) st = picard_step(st);
  const Curve<S>& eta = st.iterates.back();
  const Curve<S> etad = eta.derivative();

  const int G = opts.grid;
  auto t_of = [G](std::int64_t i) {
    return static_cast<double>(i) / static_cast<double>(G - 1);
  };
  const double residual = kernels::max_over(
      G,
      [&](std::int64_t i) {
        const double t = t_of(i);
        return p(etad.eval(t) - mul(eta.eval(t), gamma.eval(t)));
      },
      opts.exec);
  if (residual > tol + st.slack)
    throw NumericalBreakdown("ODE residual " + std::to_string(residual) +
                             " exceeds tol + slack");

  const double witness = -kernels::max_over(
      G, [&](std::int64_t i) { return -invert_witness(eta.eval(t_of(i))); }, opts.exec);
  if (!(witness > 1e-12))
    throw NumericalBreakdown("trajectory leaves the invertible set numerically (witness " +
                             std::to_string(witness) + ")");

  return EvolutionResult<S>{eta,
                            N,
                            cert.M,
                            R,
                            remainder_bound(cert.M, R, N),
                            residual,
                            st.slack,
                            witness,
                            certified,
                            0.0,
                            p,
                            cert.q};
}

template <class S>
Element<S> evol(const Curve<S>& gamma, const Seminorm<S>& p, const StarCertificate<S>& cert,
                double tol = 1e-10, EvolveOptions opts = {}) {
  return evolve(gamma, p, cert, tol, opts).eta.eval(1.0);
}

/// zeta(t) = eta(t)^{-1} on a grid.  The attached derivative comes from the
/// inversion differential, zeta' = -zeta eta' zeta, leaving the defining
/// identity zeta' = -gamma zeta independently checkable.
template <class S>
Curve<S> inverse_evolution(const EvolutionResult<S>& result, const Curve<S>& gamma,
                           int grid = 256) {
  if (result.eta.algebra().get() != gamma.algebra().get())
    throw std::invalid_argument("algebra mismatch");
  if (grid < 2) throw std::invalid_argument("grid needs >= 2 points");
  const Curve<S> etad = result.eta.derivative();
  std::vector<std::vector<S>> vals(static_cast<std::size_t>(grid));
  std::vector<std::vector<S>> ders(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid - 1);
    const Element<S> et = result.eta.eval(t);
    const auto inv = try_invert(et);
    if (!inv) throw NumericalBreakdown("non-invertible trajectory value at t = " + std::to_string(t));
    const Element<S> z = *inv;
    vals[static_cast<std::size_t>(i)] = z.c;
    ders[static_cast<std::size_t>(i)] = (S(-1) * mul(mul(z, etad.eval(t)), z)).c;
  }
  return Curve<S>::sampled_with_derivative(gamma.algebra(), std::move(vals), std::move(ders));
}

/// First directional derivative of the evolution series at gamma in direction
/// delta, via d_k = integral (d_{k-1} gamma + eta_{k-1} delta); depth chosen
/// so the derivative-series tail is below tol.
template <class S>
Curve<S> gateaux(const Curve<S>& gamma, const Curve<S>& delta, const Seminorm<S>& p,
                 const StarCertificate<S>& cert, double tol = 1e-10, EvolveOptions opts = {}) {
  require_compatible(gamma, delta);
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  const bool poly = gamma.rep() == Curve<S>::Rep::poly;
  const double R = curve_norm(gamma, 0, cert.q, {1024, poly}, opts.exec);
  const double D = curve_norm(delta, 0, cert.q, {1024, poly}, opts.exec);
  int N = -1;
  for (int k = 0; k <= opts.depth_cap; ++k)
    if (gateaux_tail_bound(cert.M, R, D, k) <= tol) {
      N = k;
      break;
    }
  if (N < 0)
    throw DepthCapExceeded("derivative tolerance unreachable within depth cap " +
                           std::to_string(opts.depth_cap));

  std::optional<Seminorm<S>> meas = p;
  const Element<S> one = unit_element(gamma.algebra());
  const Element<S> zero = zero_element(gamma.algebra());
  Curve<S> eta = detail::constant_like(gamma, one, false);
  Curve<S> d = detail::constant_like(gamma, zero, false);
  const Seminorm<S>* mp = &p;
  for (int k = 1; k <= N; ++k) {
    Curve<S> dnew =
        detail::cumulative_integral(multiply(d, gamma) + multiply(eta, delta), meas, false).first;
    Curve<S> enew =
        detail::cumulative_integral(multiply(eta, gamma), meas, false).first +
        detail::constant_like(gamma, one, false);
    if (poly && dnew.max_degree() > opts.degree_cap)
      dnew = reproject(dnew, opts.degree_cap, mp).curve;
    if (poly && enew.max_degree() > opts.degree_cap)
      enew = reproject(enew, opts.degree_cap, mp).curve;
    d = std::move(dnew);
    eta = std::move(enew);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Real evolution through the complexification

inline Curve<Real> real_part_curve(const Curve<Complex>& f, const Complexification& cx,
                                   bool imag = false) {
  auto take = [imag](const std::vector<Complex>& v) {
    std::vector<Real> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = imag ? v[i].imag() : v[i].real();
    return out;
  };
  if (f.rep() == Curve<Complex>::Rep::poly) {
    std::vector<typename Curve<Real>::CellPoly> cells;
    for (int c = 0; c < f.cell_count(); ++c) {
      typename Curve<Real>::CellPoly cell;
      for (const auto& cj : f.cell(c)) cell.push_back(take(cj));
      cells.push_back(std::move(cell));
    }
    return Curve<Real>::poly_unchecked(cx.real_algebra, f.breakpoints(), std::move(cells));
  }
  std::vector<std::vector<Real>> vals;
  for (const auto& v : f.sample_values()) vals.push_back(take(v));
  if (!imag && f.has_derivative_samples()) {
    std::vector<std::vector<Real>> ders;
    // sample_values of derivative curve
    const Curve<Complex> dc = f.derivative();
    for (const auto& v : dc.sample_values()) ders.push_back(take(v));
    return Curve<Real>::sampled_with_derivative(cx.real_algebra, std::move(vals), std::move(ders));
  }
  return Curve<Real>::sampled(cx.real_algebra, std::move(vals), f.smoothness());
}

/// Evolve a real curve inside the complexification with the split surrogate
/// seminorms (M doubled), then drop back to the real subspace.  The imaginary
/// residue is reported and must vanish within tol.
inline EvolutionResult<Real> evolve_real_via_complexification(const Curve<Real>& gamma,
                                                              const Seminorm<Real>& p,
                                                              const StarCertificate<Real>& cert,
                                                              double tol = 1e-10,
                                                              EvolveOptions opts = {}) {
  const Complexification cx = complexify(gamma.algebra());
  const Curve<Complex> gammac = embed_curve(gamma, cx);
  const StarCertificate<Complex> certc = complexify_certificate(cert, cx);
  const Seminorm<Complex> pc = complexify_seminorm(p, cx);
  EvolutionResult<Complex> rc = evolve(gammac, pc, certc, tol, opts);

  double imag_residue = 0.0;
  for (int i = 0; i < opts.grid; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(opts.grid - 1);
    const Element<Complex> v = rc.eta.eval(t);
    for (int k = 0; k < v.dim(); ++k)
      imag_residue = std::max(imag_residue, std::abs(v[k].imag()));
  }
  if (imag_residue > tol)
    throw NumericalBreakdown("imaginary residue " + std::to_string(imag_residue) +
                             " exceeds tol");

  return EvolutionResult<Real>{real_part_curve(rc.eta, cx),
                               rc.depth_used,
                               rc.M,
                               rc.R,
                               rc.tail_bound,
                               rc.residual,
                               rc.slack,
                               rc.invertibility_witness,
                               rc.certified,
                               imag_residue,
                               p,
                               cert.q};
}

}  // namespace evolab
