#pragma once

// Config parsing and deterministic output.  Specs are JSON-shaped:
//   algebra : {"type":"matrix","n":2} | {"type":"diagonal","d":3}
//           | {"type":"truncated_poly","k":4} | {"type":"upper_triangular","n":3}
//           | {"type":"structure_constants","dim":d,"field":"real|complex",
//              "table":[[[...]]],"unit":[...]}
//   seminorm: {"form":"weighted_coeff","weights":[...]}
//           | {"form":"lrr_opnorm","which":"one|inf|two"}
//           | {"form":"matrix_opnorm","which":"one|inf|two"}
//   curve   : {"rep":"poly","breakpoints":[...],"cells":[[elem,...],...]}
//           | {"rep":"samples","values":[...], "derivatives":[...]?}
// Complex scalars are written as [re, im] (plain numbers embed as real).
// All floats are emitted with 17 significant digits so reruns are
// byte-identical.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "evolab/algebra.hpp"
#include "evolab/curve.hpp"
#include "evolab/errors.hpp"
#include "evolab/picard.hpp"
#include "evolab/seminorm.hpp"

namespace evolab::io {

using json = nlohmann::ordered_json;

std::string format_double(double x);
json load_json_text(const std::string& text);
json load_json_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Flag-level overrides; unset fields fall back to config values.
struct Overrides {
  std::optional<double> tol;
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> oracle;
  std::optional<int> jobs;
  std::optional<long long> samples;
  std::optional<int> max_n;
  std::optional<int> n;
  std::optional<std::string> mode;
};

void cmd_certify(const json& config, const Overrides& ov);
void cmd_evolve(const json& config, const Overrides& ov);
void cmd_compare(const json& config, const Overrides& ov);
void cmd_mu_norm(const json& config, const Overrides& ov);

ScalarField config_field(const json& config);

/// Least-squares slope of log(discrepancy) against log(1/steps); entries with
/// zero discrepancy are skipped.  Empty when fewer than two usable points.
std::optional<double> fitted_order(const std::vector<std::pair<long long, double>>& rows);

// ---------------------------------------------------------------------------
// Spec parsing

template <class S>
S parse_scalar(const json& v) {
  if constexpr (is_complex_v<S>) {
    if (v.is_number()) return S(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return S(v[0].get<double>(), v[1].get<double>());
    throw ParseError("expected a number or [re, im] pair");
  } else {
    if (!v.is_number()) throw ParseError("expected a real number");
    return v.get<double>();
  }
}

template <class S>
std::vector<S> parse_scalar_vector(const json& v, int expect_dim = -1) {
  if (!v.is_array()) throw ParseError("expected an array of scalars");
  std::vector<S> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(parse_scalar<S>(e));
  if (expect_dim >= 0 && static_cast<int>(out.size()) != expect_dim)
    throw ParseError("coefficient vector length " + std::to_string(out.size()) +
                     " does not match algebra dimension " + std::to_string(expect_dim));
  return out;
}

template <class S>
AlgebraPtr<S> parse_algebra(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    const std::string field = j.value("field", std::string("real"));
    if (field != "real" && field != "complex") throw ParseError("unknown field: " + field);
    if ((field == "complex") != is_complex_v<S>)
      throw ParseError("algebra field does not match requested scalar type");
    if (type == "matrix") return Algebra<S>::matrix(j.at("n").get<int>());
    if (type == "diagonal") return Algebra<S>::diagonal(j.at("d").get<int>());
    if (type == "truncated_poly") return Algebra<S>::truncated_poly(j.at("k").get<int>());
    if (type == "upper_triangular") return Algebra<S>::upper_triangular(j.at("n").get<int>());
    if (type == "structure_constants") {
      const int dim = j.at("dim").get<int>();
      if (dim < 1) throw ParseError("algebra dimension must be >= 1");
      const json& tj = j.at("table");
      if (!tj.is_array() || static_cast<int>(tj.size()) != dim)
        throw ParseError("structure table must have dim slices");
      std::vector<S> table(static_cast<std::size_t>(dim) * dim * dim);
      for (int a = 0; a < dim; ++a) {
        const json& row = tj[static_cast<std::size_t>(a)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
          throw ParseError("structure table slice has wrong size");
        for (int b = 0; b < dim; ++b) {
          const auto cs = parse_scalar_vector<S>(row[static_cast<std::size_t>(b)], dim);
          for (int k = 0; k < dim; ++k)
            table[static_cast<std::size_t>((a * dim + b) * dim + k)] =
                cs[static_cast<std::size_t>(k)];
        }
      }
      auto unit = parse_scalar_vector<S>(j.at("unit"), dim);
      return Algebra<S>::from_structure(dim, std::move(table), std::move(unit));
    }
    throw ParseError("unknown algebra type: " + type);
  } catch (const json::exception& e) {
    throw ParseError(std::string("algebra spec: ") + e.what());
  }
}

inline NormWhich parse_which(const json& v) {
  const std::string s = v.get<std::string>();
  if (s == "one") return NormWhich::one;
  if (s == "inf") return NormWhich::inf;
  if (s == "two") return NormWhich::two;
  throw ParseError("unknown operator norm selector: " + s);
}

template <class S>
Seminorm<S> parse_seminorm(const json& j, const AlgebraPtr<S>& a) {
  try {
    const std::string form = j.at("form").get<std::string>();
    if (form == "weighted_coeff") {
      const json& w = j.at("weights");
      if (!w.is_array() || static_cast<int>(w.size()) != a->dim())
        throw ParseError("weights length does not match algebra dimension");
      std::vector<double> weights;
      for (const auto& e : w) weights.push_back(e.get<double>());
      return Seminorm<S>::weighted_coeff(a, std::move(weights));
    }
    if (form == "lrr_opnorm") return Seminorm<S>::lrr_opnorm(a, parse_which(j.at("which")));
    if (form == "matrix_opnorm") return Seminorm<S>::matrix_opnorm(a, parse_which(j.at("which")));
    throw ParseError("unknown seminorm form: " + form);
  } catch (const json::exception& e) {
    throw ParseError(std::string("seminorm spec: ") + e.what());
  }
}

template <class S>
Curve<S> parse_curve(const json& j, const AlgebraPtr<S>& a) {
  try {
    const std::string rep = j.at("rep").get<std::string>();
    if (rep == "poly") {
      std::vector<double> breaks;
      for (const auto& b : j.at("breakpoints")) breaks.push_back(b.get<double>());
      std::vector<typename Curve<S>::CellPoly> cells;
      for (const auto& cj : j.at("cells")) {
        typename Curve<S>::CellPoly cell;
        for (const auto& coef : cj) cell.push_back(parse_scalar_vector<S>(coef, a->dim()));
        cells.push_back(std::move(cell));
      }
      return Curve<S>::poly(a, std::move(breaks), std::move(cells));
    }
    if (rep == "samples") {
      std::vector<std::vector<S>> vals;
      for (const auto& v : j.at("values")) vals.push_back(parse_scalar_vector<S>(v, a->dim()));
      if (j.contains("derivatives")) {
        std::vector<std::vector<S>> ders;
        for (const auto& v : j.at("derivatives"))
          ders.push_back(parse_scalar_vector<S>(v, a->dim()));
        return Curve<S>::sampled_with_derivative(a, std::move(vals), std::move(ders));
      }
      return Curve<S>::sampled(a, std::move(vals));
    }
    throw ParseError("unknown curve rep: " + rep);
  } catch (const json::exception& e) {
    throw ParseError(std::string("curve spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Serialization

template <class S>
json seminorm_spec_json(const Seminorm<S>& q) {
  json j;
  switch (q.form()) {
    case Seminorm<S>::Form::weighted_coeff:
      j["form"] = "weighted_coeff";
      j["weights"] = q.weights();
      break;
    case Seminorm<S>::Form::lrr_opnorm:
      j["form"] = "lrr_opnorm";
      j["which"] = which_name(q.which());
      break;
    case Seminorm<S>::Form::matrix_opnorm:
      j["form"] = "matrix_opnorm";
      j["which"] = which_name(q.which());
      break;
    case Seminorm<S>::Form::complex_split:
      j["form"] = "complex_split";
      break;
  }
  return j;
}

template <class S>
json certificate_json(const StarCertificate<S>& cert) {
  json j;
  j["q"] = seminorm_spec_json(cert.q);
  j["M"] = cert.M;
  j["r"] = cert.r;
  j["validated_up_to"] = cert.validated_up_to;
  j["method"] = cert.method;
  return j;
}

template <class S>
json evolution_json(const EvolutionResult<S>& res) {
  json j;
  j["depth"] = res.depth_used;
  j["M"] = res.M;
  j["R"] = res.R;
  j["tail_bound"] = res.tail_bound;
  j["residual"] = res.residual;
  j["slack"] = res.slack;
  return j;
}

template <class S>
std::string trajectory_csv(const Curve<S>& eta, int grid) {
  if (grid < 2) throw std::invalid_argument("grid needs >= 2 rows");
  const int d = eta.algebra()->dim();
  std::string out = "t";
  for (int k = 0; k < d; ++k) {
    if constexpr (is_complex_v<S>) {
      out += ", coeff_" + std::to_string(k) + "_re";
      out += ", coeff_" + std::to_string(k) + "_im";
    } else {
      out += ", coeff_" + std::to_string(k);
    }
  }
  out += "\n";
  for (int i = 0; i < grid; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid - 1);
    const Element<S> v = eta.eval(t);
    out += format_double(t);
    for (int k = 0; k < d; ++k) {
      if constexpr (is_complex_v<S>) {
        out += ", " + format_double(v[k].real());
        out += ", " + format_double(v[k].imag());
      } else {
        out += ", " + format_double(v[k]);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace evolab::io
