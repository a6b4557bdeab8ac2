#pragma once

// Curves [0,1] -> A in two representations.  Piecewise-polynomial cells (local
// variable u = t - cell start) support exact products, derivatives and
// integrals and are the certified path; uniformly sampled curves are the
// convenience path with quadrature-grade accuracy only.  Sampled curves may
// carry attached derivative samples (used when the derivative is known in
// closed form and a finite-difference stencil would waste accuracy).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "evolab/algebra.hpp"
#include "evolab/errors.hpp"
#include "evolab/kernels.hpp"
#include "evolab/seminorm.hpp"

namespace evolab {

template <class S>
class Curve {
 public:
  enum class Rep { poly, sampled };
  // Coefficient lists per cell: cell[j] is the coefficient vector of u^j.
  using CellPoly = std::vector<std::vector<S>>;

  static Curve constant(const Element<S>& c) {
    Curve g;
    g.rep_ = Rep::poly;
    g.alg_ = c.alg;
    g.breaks_ = {0.0, 1.0};
    g.cells_ = {CellPoly{c.c}};
    g.smoothness_ = poly_smoothness();
    return g;
  }

  static Curve poly(AlgebraPtr<S> a, std::vector<double> breaks, std::vector<CellPoly> cells,
                    double continuity_tol = 1e-12) {
    Curve g;
    g.rep_ = Rep::poly;
    g.alg_ = std::move(a);
    g.breaks_ = std::move(breaks);
    g.cells_ = std::move(cells);
    g.smoothness_ = poly_smoothness();
    g.validate_poly(continuity_tol);
    return g;
  }

  static Curve sampled(AlgebraPtr<S> a, std::vector<std::vector<S>> values, int smoothness = 0) {
    Curve g;
    g.rep_ = Rep::sampled;
    g.alg_ = std::move(a);
    g.values_ = std::move(values);
    g.smoothness_ = smoothness;
    g.validate_sampled();
    return g;
  }

  static Curve sampled_with_derivative(AlgebraPtr<S> a, std::vector<std::vector<S>> values,
                                       std::vector<std::vector<S>> derivative_values) {
    Curve g;
    g.rep_ = Rep::sampled;
    g.alg_ = std::move(a);
    g.values_ = std::move(values);
    g.derivs_ = std::move(derivative_values);
    g.smoothness_ = 1;
    g.validate_sampled();
    if (g.derivs_.size() != g.values_.size())
      throw ParseError("derivative sample count must match value sample count");
    return g;
  }

  Rep rep() const { return rep_; }
  AlgebraPtr<S> algebra() const { return alg_; }
  int smoothness() const { return smoothness_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  const CellPoly& cell(int c) const { return cells_[static_cast<std::size_t>(c)]; }
  const std::vector<std::vector<S>>& sample_values() const { return values_; }
  bool has_derivative_samples() const { return !derivs_.empty(); }
  int max_degree() const {
    int d = 0;
    for (const auto& c : cells_) d = std::max(d, static_cast<int>(c.size()) - 1);
    return d;
  }

  Element<S> eval(double t) const {
    check_time(t);
    if (rep_ == Rep::poly) {
      const int c = locate_cell(t);
      const double u = t - breaks_[static_cast<std::size_t>(c)];
      return element_at(cells_[static_cast<std::size_t>(c)], u);
    }
    const std::size_t m = values_.size();
    const double pos = t * static_cast<double>(m - 1);
    std::size_t i0 = static_cast<std::size_t>(pos);
    if (i0 >= m - 1) i0 = m - 2;
    const double f = pos - static_cast<double>(i0);
    Element<S> x = zero_element(alg_);
    for (int i = 0; i < x.dim(); ++i)
      x[i] = values_[i0][static_cast<std::size_t>(i)] * S(1.0 - f) +
             values_[i0 + 1][static_cast<std::size_t>(i)] * S(f);
    return x;
  }

  Curve derivative() const {
    if (rep_ == Rep::poly) {
      Curve g;
      g.rep_ = Rep::poly;
      g.alg_ = alg_;
      g.breaks_ = breaks_;
      g.smoothness_ = poly_smoothness();
      g.cells_.reserve(cells_.size());
      for (const auto& cell : cells_) {
        CellPoly d;
        if (cell.size() <= 1) {
          d.push_back(std::vector<S>(static_cast<std::size_t>(alg_->dim()), S(0)));
        } else {
          for (std::size_t j = 1; j < cell.size(); ++j) {
            std::vector<S> cj = cell[j];
            for (auto& v : cj) v *= S(static_cast<double>(j));
            d.push_back(std::move(cj));
          }
        }
        g.cells_.push_back(std::move(d));
      }
      return g;
    }
    if (!derivs_.empty()) {
      Curve g;
      g.rep_ = Rep::sampled;
      g.alg_ = alg_;
      g.values_ = derivs_;
      g.smoothness_ = std::max(smoothness_ - 1, 0);
      return g;
    }
    if (smoothness_ < 1)
      throw std::invalid_argument("derivative order unsupported by sampled representation");
    const std::size_t m = values_.size();
    const double h = 1.0 / static_cast<double>(m - 1);
    std::vector<std::vector<S>> d(m, std::vector<S>(static_cast<std::size_t>(alg_->dim())));
    for (int i = 0; i < alg_->dim(); ++i) {
      const std::size_t ii = static_cast<std::size_t>(i);
      d[0][ii] = (values_[1][ii] - values_[0][ii]) * S(1.0 / h);
      d[m - 1][ii] = (values_[m - 1][ii] - values_[m - 2][ii]) * S(1.0 / h);
      for (std::size_t k = 1; k + 1 < m; ++k)
        d[k][ii] = (values_[k + 1][ii] - values_[k - 1][ii]) * S(0.5 / h);
    }
    Curve g;
    g.rep_ = Rep::sampled;
    g.alg_ = alg_;
    g.values_ = std::move(d);
    g.smoothness_ = std::max(smoothness_ - 1, 0);
    return g;
  }

  /// Exact antiderivative with value 0 at t = 0 (polynomial curves only).
  Curve antiderivative() const {
    if (rep_ != Rep::poly)
      throw std::invalid_argument("antiderivative requires the polynomial representation");
    Curve g;
    g.rep_ = Rep::poly;
    g.alg_ = alg_;
    g.breaks_ = breaks_;
    g.smoothness_ = poly_smoothness();
    std::vector<S> running(static_cast<std::size_t>(alg_->dim()), S(0));
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const auto& cell = cells_[c];
      CellPoly F;
      F.push_back(running);
      for (std::size_t j = 0; j < cell.size(); ++j) {
        std::vector<S> cj = cell[j];
        for (auto& v : cj) v *= S(1.0 / static_cast<double>(j + 1));
        F.push_back(std::move(cj));
      }
      const double len = breaks_[c + 1] - breaks_[c];
      running = eval_local(F, len);
      g.cells_.push_back(std::move(F));
    }
    return g;
  }

  Element<S> integrate(double a, double b) const {
    if (a > b) throw std::invalid_argument("integrate needs a <= b");
    check_time(a);
    check_time(b);
    if (rep_ == Rep::poly) {
      Element<S> acc = zero_element(alg_);
      for (std::size_t c = 0; c < cells_.size(); ++c) {
        const double s = breaks_[c], e = breaks_[c + 1];
        const double lo = std::max(a, s), hi = std::min(b, e);
        if (lo >= hi) continue;
        const auto& cell = cells_[c];
        for (std::size_t j = 0; j < cell.size(); ++j) {
          const double w = (std::pow(hi - s, static_cast<double>(j + 1)) -
                            std::pow(lo - s, static_cast<double>(j + 1))) /
                           static_cast<double>(j + 1);
          for (int i = 0; i < alg_->dim(); ++i)
            acc[i] += cell[j][static_cast<std::size_t>(i)] * S(w);
        }
      }
      return acc;
    }
    return integrate_sampled(a, b);
  }

  // Internal constructor bypassing the continuity check (derivatives and
  // re-projections may legitimately perturb or break it).
  static Curve poly_unchecked(AlgebraPtr<S> a, std::vector<double> breaks,
                              std::vector<CellPoly> cells) {
    Curve g;
    g.rep_ = Rep::poly;
    g.alg_ = std::move(a);
    g.breaks_ = std::move(breaks);
    g.cells_ = std::move(cells);
    g.smoothness_ = poly_smoothness();
    return g;
  }

  static constexpr int poly_smoothness() { return 1 << 20; }

  Element<S> element_at(const CellPoly& cell, double u) const {
    return {alg_, eval_local(cell, u)};
  }

 private:
  Curve() = default;

  void check_time(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("time outside [0,1]");
  }

  int locate_cell(double t) const {
    int lo = 0, hi = static_cast<int>(cells_.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi + 1) / 2;
      if (breaks_[static_cast<std::size_t>(mid)] <= t)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  std::vector<S> eval_local(const CellPoly& cell, double u) const {
    std::vector<S> acc = cell.back();
    for (std::size_t j = cell.size() - 1; j-- > 0;) {
      for (int i = 0; i < alg_->dim(); ++i)
        acc[static_cast<std::size_t>(i)] =
            acc[static_cast<std::size_t>(i)] * S(u) + cell[j][static_cast<std::size_t>(i)];
    }
    return acc;
  }

  void validate_poly(double continuity_tol) const {
    if (breaks_.size() < 2 || cells_.size() + 1 != breaks_.size())
      throw ParseError("breakpoints and cells disagree");
    if (std::abs(breaks_.front()) > 1e-15 || std::abs(breaks_.back() - 1.0) > 1e-15)
      throw ParseError("breakpoints must span [0,1]");
    for (std::size_t c = 0; c + 1 < breaks_.size(); ++c)
      if (!(breaks_[c] < breaks_[c + 1])) throw ParseError("breakpoints must strictly increase");
    const std::size_t d = static_cast<std::size_t>(alg_->dim());
    for (const auto& cell : cells_) {
      if (cell.empty()) throw ParseError("each cell needs at least one coefficient vector");
      for (const auto& cj : cell)
        if (cj.size() != d) throw ParseError("coefficient vector size must equal algebra dim");
    }
    for (std::size_t c = 0; c + 1 < cells_.size(); ++c) {
      const double len = breaks_[c + 1] - breaks_[c];
      const std::vector<S> left = eval_local(cells_[c], len);
      const std::vector<S>& right = cells_[c + 1][0];
      for (std::size_t i = 0; i < d; ++i)
        if (scalar_abs(left[i] - right[i]) > continuity_tol)
          throw ParseError("cells are discontinuous at breakpoint " + std::to_string(c + 1));
    }
  }

  void validate_sampled() const {
    if (values_.size() < 2) throw ParseError("sampled curves need at least 2 points");
    const std::size_t d = static_cast<std::size_t>(alg_->dim());
    for (const auto& v : values_)
      if (v.size() != d) throw ParseError("sample size must equal algebra dim");
    for (const auto& v : derivs_)
      if (v.size() != d) throw ParseError("derivative sample size must equal algebra dim");
  }

  /// Composite Simpson over the full panels in [a,b], a trapezoid pad if the
  /// panel count is odd, and trapezoids for the fractional end pieces.
  Element<S> integrate_sampled(double a, double b) const {
    const std::size_t m = values_.size();
    const double h = 1.0 / static_cast<double>(m - 1);
    auto value_at = [&](std::size_t i) { return Element<S>{alg_, values_[i]}; };
    const double eps = 1e-12;
    std::size_t ia = static_cast<std::size_t>(std::max(0.0, std::ceil(a / h - eps)));
    std::size_t ib = static_cast<std::size_t>(std::max(0.0, std::floor(b / h + eps)));
    if (ia > m - 1) ia = m - 1;
    if (ib > m - 1) ib = m - 1;
    Element<S> acc = zero_element(alg_);
    if (ia > ib) {  // a and b inside one panel
      Element<S> mid = S(0.5) * (eval(a) + eval(b));
      return S(b - a) * mid;
    }
    const double ta = static_cast<double>(ia) * h;
    const double tb = static_cast<double>(ib) * h;
    if (a < ta - eps) acc = acc + S(0.5 * (ta - a)) * (eval(a) + value_at(ia));
    if (b > tb + eps) acc = acc + S(0.5 * (b - tb)) * (value_at(ib) + eval(b));
    std::size_t panels = ib - ia;
    const std::size_t pairs = panels / 2;
    for (std::size_t k = 0; k < pairs; ++k) {
      const std::size_t i0 = ia + 2 * k;
      acc = acc + S(h / 3.0) * (value_at(i0) + S(4.0) * value_at(i0 + 1) + value_at(i0 + 2));
    }
    if (panels % 2 == 1)
      acc = acc + S(0.5 * h) * (value_at(ib - 1) + value_at(ib));
    return acc;
  }

  Rep rep_ = Rep::poly;
  AlgebraPtr<S> alg_;
  std::vector<double> breaks_;
  std::vector<CellPoly> cells_;
  std::vector<std::vector<S>> values_;
  std::vector<std::vector<S>> derivs_;
  int smoothness_ = 0;

  template <class T>
  friend Curve<T> with_breakpoints(const Curve<T>&, const std::vector<double>&);
};

// ---------------------------------------------------------------------------
// Structural helpers

template <class S>
void require_compatible(const Curve<S>& f, const Curve<S>& g) {
  if (f.algebra().get() != g.algebra().get()) throw std::invalid_argument("algebra mismatch");
  if (f.rep() != g.rep()) throw std::invalid_argument("representation mismatch");
  if (f.rep() == Curve<S>::Rep::sampled &&
      f.sample_values().size() != g.sample_values().size())
    throw std::invalid_argument("representation mismatch: sample grids differ");
}

inline std::vector<double> merge_breakpoints(const std::vector<double>& a,
                                             const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  std::vector<double> dedup;
  for (double t : out)
    if (dedup.empty() || t - dedup.back() > 1e-14) dedup.push_back(t);
  dedup.front() = 0.0;
  dedup.back() = 1.0;
  return dedup;
}

/// Exact refinement of a polynomial curve onto a superset of its breakpoints
/// (Taylor shift of each cell polynomial to the new cell anchors).
template <class S>
Curve<S> with_breakpoints(const Curve<S>& f, const std::vector<double>& nb) {
  if (f.rep() != Curve<S>::Rep::poly)
    throw std::invalid_argument("breakpoint refinement requires the polynomial representation");
  std::vector<typename Curve<S>::CellPoly> cells;
  cells.reserve(nb.size() - 1);
  const auto& ob = f.breakpoints();
  const int dim = f.algebra()->dim();
  for (std::size_t c = 0; c + 1 < nb.size(); ++c) {
    const double s = nb[c];
    // Owning original cell: the last one starting at or before s.
    std::size_t oc = 0;
    while (oc + 2 < ob.size() && ob[oc + 1] <= s + 1e-14) ++oc;
    typename Curve<S>::CellPoly cell = f.cell(static_cast<int>(oc));
    const double delta = s - ob[oc];
    if (delta > 0.0) {
      // In-place Taylor shift: coefficients of p(u + delta).
      const std::size_t deg = cell.size() - 1;
      for (std::size_t j = 0; j < deg; ++j)
        for (std::size_t i = deg - 1; i + 1 > j; --i)
          for (int k = 0; k < dim; ++k)
            cell[i][static_cast<std::size_t>(k)] +=
                S(delta) * cell[i + 1][static_cast<std::size_t>(k)];
    }
    cells.push_back(std::move(cell));
  }
  return Curve<S>::poly_unchecked(f.algebra(), nb, std::move(cells));
}

template <class S>
Curve<S> operator+(const Curve<S>& f, const Curve<S>& g) {
  require_compatible(f, g);
  if (f.rep() == Curve<S>::Rep::poly) {
    const auto nb = merge_breakpoints(f.breakpoints(), g.breakpoints());
    const Curve<S> a = with_breakpoints(f, nb);
    const Curve<S> b = with_breakpoints(g, nb);
    std::vector<typename Curve<S>::CellPoly> cells;
    const std::size_t dim = static_cast<std::size_t>(f.algebra()->dim());
    for (int c = 0; c < a.cell_count(); ++c) {
      const auto& ca = a.cell(c);
      const auto& cb = b.cell(c);
      typename Curve<S>::CellPoly out(std::max(ca.size(), cb.size()),
                                      std::vector<S>(dim, S(0)));
      for (std::size_t j = 0; j < ca.size(); ++j)
        for (std::size_t i = 0; i < dim; ++i) out[j][i] += ca[j][i];
      for (std::size_t j = 0; j < cb.size(); ++j)
        for (std::size_t i = 0; i < dim; ++i) out[j][i] += cb[j][i];
      cells.push_back(std::move(out));
    }
    return Curve<S>::poly_unchecked(f.algebra(), nb, std::move(cells));
  }
  std::vector<std::vector<S>> vals = f.sample_values();
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t k = 0; k < vals[i].size(); ++k) vals[i][k] += g.sample_values()[i][k];
  if (f.has_derivative_samples() && g.has_derivative_samples()) {
    std::vector<std::vector<S>> ders = f.derivative().sample_values();
    const auto gd = g.derivative().sample_values();
    for (std::size_t i = 0; i < ders.size(); ++i)
      for (std::size_t k = 0; k < ders[i].size(); ++k) ders[i][k] += gd[i][k];
    return Curve<S>::sampled_with_derivative(f.algebra(), std::move(vals), std::move(ders));
  }
  return Curve<S>::sampled(f.algebra(), std::move(vals),
                           std::min(f.smoothness(), g.smoothness()));
}

template <class S>
Curve<S> operator*(const S& s, const Curve<S>& f) {
  if (f.rep() == Curve<S>::Rep::poly) {
    std::vector<typename Curve<S>::CellPoly> cells;
    for (int c = 0; c < f.cell_count(); ++c) {
      auto cell = f.cell(c);
      for (auto& cj : cell)
        for (auto& v : cj) v *= s;
      cells.push_back(std::move(cell));
    }
    return Curve<S>::poly_unchecked(f.algebra(), f.breakpoints(), std::move(cells));
  }
  std::vector<std::vector<S>> vals = f.sample_values();
  for (auto& row : vals)
    for (auto& v : row) v *= s;
  return Curve<S>::sampled(f.algebra(), std::move(vals), f.smoothness());
}

template <class S>
Curve<S> operator-(const Curve<S>& f, const Curve<S>& g) {
  return f + (S(-1) * g);
}

/// Pointwise algebra product; cell degrees add in polynomial mode.
template <class S>
Curve<S> multiply(const Curve<S>& f, const Curve<S>& g) {
  require_compatible(f, g);
  const AlgebraPtr<S> alg = f.algebra();
  const std::size_t dim = static_cast<std::size_t>(alg->dim());
  if (f.rep() == Curve<S>::Rep::poly) {
    const auto nb = merge_breakpoints(f.breakpoints(), g.breakpoints());
    const Curve<S> a = with_breakpoints(f, nb);
    const Curve<S> b = with_breakpoints(g, nb);
    std::vector<typename Curve<S>::CellPoly> cells;
    std::vector<S> prod(dim);
    for (int c = 0; c < a.cell_count(); ++c) {
      const auto& ca = a.cell(c);
      const auto& cb = b.cell(c);
      typename Curve<S>::CellPoly out(ca.size() + cb.size() - 1, std::vector<S>(dim, S(0)));
      for (std::size_t ja = 0; ja < ca.size(); ++ja)
        for (std::size_t jb = 0; jb < cb.size(); ++jb) {
          alg->mul_into(ca[ja], cb[jb], prod);
          for (std::size_t i = 0; i < dim; ++i) out[ja + jb][i] += prod[i];
        }
      cells.push_back(std::move(out));
    }
    return Curve<S>::poly_unchecked(alg, nb, std::move(cells));
  }
  std::vector<std::vector<S>> vals(f.sample_values().size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i].resize(dim);
    alg->mul_into(f.sample_values()[i], g.sample_values()[i], vals[i]);
  }
  return Curve<S>::sampled(alg, std::move(vals), std::min(f.smoothness(), g.smoothness()));
}

/// u -> f(min(s+u, 1)): the tail of f starting at s, frozen at f(1) past the
/// end.  Solves the shifted initial-value problem used by the cocycle law.
template <class S>
Curve<S> shift_clamp(const Curve<S>& f, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("shift outside [0,1]");
  if (s == 0.0) return f;
  const AlgebraPtr<S> alg = f.algebra();
  if (f.rep() == Curve<S>::Rep::poly) {
    const auto& ob = f.breakpoints();
    std::vector<double> nb{0.0};
    std::vector<typename Curve<S>::CellPoly> cells;
    // Cell containing s, re-anchored at s; then the remaining whole cells.
    std::size_t oc = 0;
    while (oc + 2 < ob.size() && ob[oc + 1] <= s + 1e-14) ++oc;
    const int dim = alg->dim();
    for (std::size_t c = oc; c + 1 < ob.size(); ++c) {
      typename Curve<S>::CellPoly cell = f.cell(static_cast<int>(c));
      if (c == oc && s > ob[c]) {
        const double delta = s - ob[c];
        const std::size_t deg = cell.size() - 1;
        for (std::size_t j = 0; j < deg; ++j)
          for (std::size_t i = deg - 1; i + 1 > j; --i)
            for (int k = 0; k < dim; ++k)
              cell[i][static_cast<std::size_t>(k)] +=
                  S(delta) * cell[i + 1][static_cast<std::size_t>(k)];
      }
      const double end = ob[c + 1] - s;
      if (end <= 1e-14) continue;
      cells.push_back(std::move(cell));
      nb.push_back(std::min(end, 1.0));
      if (end >= 1.0) break;
    }
    if (nb.back() < 1.0) {  // clamp cell holding the final value
      const Element<S> last = f.eval(1.0);
      cells.push_back(typename Curve<S>::CellPoly{last.c});
      nb.push_back(1.0);
    }
    return Curve<S>::poly_unchecked(alg, std::move(nb), std::move(cells));
  }
  const std::size_t m = f.sample_values().size();
  std::vector<std::vector<S>> vals(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = std::min(s + static_cast<double>(i) / static_cast<double>(m - 1), 1.0);
    vals[i] = f.eval(t).c;
  }
  return Curve<S>::sampled(alg, std::move(vals), f.smoothness());
}

// ---------------------------------------------------------------------------
// Curve seminorms

struct CurveNormOptions {
  int grid = 1024;     // interior refinement points across [0,1]
  bool inflate = false;  // add h * (cell derivative bound): rigorous upper bound
};

namespace detail {

/// Sup of p over one derivative order; polynomial path is per cell (grid max,
/// optionally inflated by half-step times a coefficient derivative bound).
template <class S>
double sup_seminorm(const Curve<S>& f, const Seminorm<S>& p, const CurveNormOptions& opts,
                    kernels::Exec exec) {
  if (f.rep() == Curve<S>::Rep::poly) {
    return kernels::max_over(
        f.cell_count(),
        [&](std::int64_t c) {
          const auto& cell = f.cell(static_cast<int>(c));
          const double len = f.breakpoints()[static_cast<std::size_t>(c + 1)] -
                             f.breakpoints()[static_cast<std::size_t>(c)];
          const int npts = std::max(2, static_cast<int>(std::ceil(opts.grid * len)) + 1);
          double best = 0.0;
          for (int i = 0; i < npts; ++i) {
            const double u = len * static_cast<double>(i) / static_cast<double>(npts - 1);
            best = std::max(best, p(f.element_at(cell, u)));
          }
          if (opts.inflate && cell.size() > 1) {
            double dbound = 0.0;
            for (std::size_t j = 1; j < cell.size(); ++j) {
              double pj = p(Element<S>{f.algebra(), cell[j]});
              dbound += static_cast<double>(j) * pj * std::pow(len, static_cast<double>(j - 1));
            }
            best += 0.5 * len / static_cast<double>(npts - 1) * dbound;
          }
          return best;
        },
        exec);
  }
  return kernels::max_over(
      static_cast<std::int64_t>(f.sample_values().size()),
      [&](std::int64_t i) {
        return p(Element<S>{f.algebra(), f.sample_values()[static_cast<std::size_t>(i)]});
      },
      exec);
}

}  // namespace detail

/// max_{j<=k} sup_t p(f^(j)(t)).  Grid-based; with opts.inflate it is a
/// certified upper bound on polynomial curves.
template <class S>
double curve_norm(const Curve<S>& f, int k, const Seminorm<S>& p, CurveNormOptions opts = {},
                  kernels::Exec exec = kernels::Exec::parallel) {
  if (k < 0) throw std::invalid_argument("curve_norm needs k >= 0");
  if (f.algebra().get() != p.algebra().get()) throw std::invalid_argument("algebra mismatch");
  if (f.rep() == Curve<S>::Rep::sampled) {
    if (k > f.smoothness())
      throw std::invalid_argument("unsupported derivative order for sampled curve");
    if (opts.inflate)
      throw std::invalid_argument("certified norm bound requires polynomial representation");
  }
  double best = 0.0;
  Curve<S> d = f;
  for (int j = 0; j <= k; ++j) {
    best = std::max(best, detail::sup_seminorm(d, p, opts, exec));
    if (j < k) d = d.derivative();
  }
  return best;
}

template <class S>
double lipschitz_bound(const Curve<S>& f, const Seminorm<S>& p) {
  return curve_norm(f.derivative(), 0, p);
}

// ---------------------------------------------------------------------------
// Degree-cap re-projection

template <class S>
struct Reprojected {
  Curve<S> curve;
  double slack_c0 = 0.0;  // sup p(old - new) on the refinement grid
  double slack_c1 = 0.0;  // sup p(old' - new') on the refinement grid
};

/// Least-squares fit of over-degree cells onto degree <= cap, nodewise in the
/// Chebyshev-Lobatto points of each cell.  The map is linear in the input
/// curve (fixed nodes, fixed solve), which preserves homogeneity and
/// multilinearity of everything built from it.  The constant term is adjusted
/// so the cell's left endpoint value is reproduced exactly; errors are
/// measured on a refine x (old degree + 1) grid in both value and derivative.
template <class S>
Reprojected<S> reproject(const Curve<S>& f, int cap, const Seminorm<S>* measure,
                         int refine = 4) {
  if (f.rep() != Curve<S>::Rep::poly)
    throw std::invalid_argument("re-projection requires the polynomial representation");
  if (cap < 1) throw std::invalid_argument("degree cap must be >= 1");
  if (f.max_degree() <= cap) return {f, 0.0, 0.0};

  const AlgebraPtr<S> alg = f.algebra();
  const int dim = alg->dim();
  auto p_of = [&](const std::vector<S>& coeffs) {
    Element<S> e{alg, coeffs};
    if (measure) return (*measure)(e);
    return coeff_inf_norm(e);
  };

  std::vector<typename Curve<S>::CellPoly> cells;
  double e0 = 0.0, e1 = 0.0;
  for (int c = 0; c < f.cell_count(); ++c) {
    const auto& cell = f.cell(c);
    const int dold = static_cast<int>(cell.size()) - 1;
    if (dold <= cap) {
      cells.push_back(cell);
      continue;
    }
    const double len = f.breakpoints()[static_cast<std::size_t>(c + 1)] -
                       f.breakpoints()[static_cast<std::size_t>(c)];
    const int npts = 2 * (dold + 1);
    // Fit in tau = 2u/len - 1 on Chebyshev-Lobatto nodes.
    Eigen::MatrixXd A(npts, cap + 1);
    DenseMatrix<S> B(npts, dim);
    for (int i = 0; i < npts; ++i) {
      const double tau = std::cos(M_PI * static_cast<double>(i) / static_cast<double>(npts - 1));
      double tp = 1.0;
      for (int j = 0; j <= cap; ++j) {
        A(i, j) = tp;
        tp *= tau;
      }
      const std::vector<S> v = f.element_at(cell, 0.5 * len * (tau + 1.0)).c;
      for (int k = 0; k < dim; ++k) B(i, k) = v[static_cast<std::size_t>(k)];
    }
    const DenseMatrix<S> X = A.cast<S>().householderQr().solve(B);
    // Convert sum_j X_j tau^j back to the local monomial basis via Horner in
    // tau = alpha*u + beta.
    const double alpha = 2.0 / len, beta = -1.0;
    typename Curve<S>::CellPoly out(static_cast<std::size_t>(cap) + 1,
                                    std::vector<S>(static_cast<std::size_t>(dim), S(0)));
    for (int k = 0; k < dim; ++k) out[0][static_cast<std::size_t>(k)] = X(cap, k);
    std::size_t top = 0;
    for (int j = cap - 1; j >= 0; --j) {
      ++top;
      for (std::size_t i = top; i >= 1; --i)
        for (int k = 0; k < dim; ++k)
          out[i][static_cast<std::size_t>(k)] = S(beta) * out[i][static_cast<std::size_t>(k)] +
                                                S(alpha) * out[i - 1][static_cast<std::size_t>(k)];
      for (int k = 0; k < dim; ++k)
        out[0][static_cast<std::size_t>(k)] =
            S(beta) * out[0][static_cast<std::size_t>(k)] + S(X(j, k));
    }
    // Pin the left endpoint value so running constants (eta(0) = 1, F(0) = 0)
    // survive exactly.
    for (int k = 0; k < dim; ++k)
      out[0][static_cast<std::size_t>(k)] = cell[0][static_cast<std::size_t>(k)];

    // Measure what the projection did, in value and in derivative.
    const int m = refine * (dold + 1);
    for (int i = 0; i <= m; ++i) {
      const double u = len * static_cast<double>(i) / static_cast<double>(m);
      std::vector<S> dv(static_cast<std::size_t>(dim), S(0)), dn = dv, vv = dv, vn = dv;
      for (std::size_t j = cell.size(); j-- > 0;)
        for (int k = 0; k < dim; ++k) {
          vv[static_cast<std::size_t>(k)] =
              vv[static_cast<std::size_t>(k)] * S(u) + cell[j][static_cast<std::size_t>(k)];
          if (j >= 1)
            dv[static_cast<std::size_t>(k)] = dv[static_cast<std::size_t>(k)] * S(u) +
                                              S(static_cast<double>(j)) *
                                                  cell[j][static_cast<std::size_t>(k)];
        }
      for (std::size_t j = out.size(); j-- > 0;)
        for (int k = 0; k < dim; ++k) {
          vn[static_cast<std::size_t>(k)] =
              vn[static_cast<std::size_t>(k)] * S(u) + out[j][static_cast<std::size_t>(k)];
          if (j >= 1)
            dn[static_cast<std::size_t>(k)] = dn[static_cast<std::size_t>(k)] * S(u) +
                                              S(static_cast<double>(j)) *
                                                  out[j][static_cast<std::size_t>(k)];
        }
      std::vector<S> diff0(static_cast<std::size_t>(dim)), diff1(static_cast<std::size_t>(dim));
      for (int k = 0; k < dim; ++k) {
        diff0[static_cast<std::size_t>(k)] =
            vv[static_cast<std::size_t>(k)] - vn[static_cast<std::size_t>(k)];
        diff1[static_cast<std::size_t>(k)] =
            dv[static_cast<std::size_t>(k)] - dn[static_cast<std::size_t>(k)];
      }
      e0 = std::max(e0, p_of(diff0));
      e1 = std::max(e1, p_of(diff1));
    }
    cells.push_back(std::move(out));
  }
  return {Curve<S>::poly_unchecked(alg, f.breakpoints(), std::move(cells)), e0, e1};
}

// ---------------------------------------------------------------------------
// Complexification of curves

inline Curve<Complex> embed_curve(const Curve<Real>& f, const Complexification& cx) {
  if (f.algebra().get() != cx.real_algebra.get()) throw std::invalid_argument("algebra mismatch");
  auto lift = [](const std::vector<Real>& v) {
    std::vector<Complex> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = Complex(v[i], 0.0);
    return out;
  };
  if (f.rep() == Curve<Real>::Rep::poly) {
    std::vector<typename Curve<Complex>::CellPoly> cells;
    for (int c = 0; c < f.cell_count(); ++c) {
      typename Curve<Complex>::CellPoly cell;
      for (const auto& cj : f.cell(c)) cell.push_back(lift(cj));
      cells.push_back(std::move(cell));
    }
    return Curve<Complex>::poly_unchecked(cx.algebra, f.breakpoints(), std::move(cells));
  }
  std::vector<std::vector<Complex>> vals;
  vals.reserve(f.sample_values().size());
  for (const auto& v : f.sample_values()) vals.push_back(lift(v));
  return Curve<Complex>::sampled(cx.algebra, std::move(vals), f.smoothness());
}

}  // namespace evolab
