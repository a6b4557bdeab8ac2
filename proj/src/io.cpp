#include "evolab/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "evolab/oracles.hpp"

namespace evolab::io {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json load_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_json_text(ss.str());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write file: " + path);
  out << content;
}

ScalarField config_field(const json& config) {
  try {
    const std::string f = config.at("algebra").value("field", std::string("real"));
    if (f == "real") return ScalarField::real;
    if (f == "complex") return ScalarField::complex;
    throw ParseError("unknown field: " + f);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

namespace {

struct RunParams {
  double tol = 1e-10;
  int grid = 256;
  std::uint64_t seed = 0;
  long long samples = 10000;
  int max_n = 6;
  int n = 2;
  std::string mode = "sampled";
  std::string oracle = "euler";
  std::string out_dir = ".";
  std::vector<long long> steps;
};

RunParams merge(const json& config, const Overrides& ov) {
  RunParams rp;
  try {
    rp.tol = ov.tol ? *ov.tol : config.value("tol", 1e-10);
    rp.grid = ov.grid ? *ov.grid : config.value("grid", 256);
    rp.seed = ov.seed ? *ov.seed : config.value("seed", std::uint64_t{0});
    rp.samples = ov.samples ? *ov.samples : config.value("samples", 10000LL);
    rp.max_n = ov.max_n ? *ov.max_n : config.value("max_n", 6);
    rp.n = ov.n ? *ov.n : config.value("n", 2);
    rp.mode = ov.mode ? *ov.mode : config.value("mode", std::string("sampled"));
    rp.oracle = ov.oracle ? *ov.oracle : config.value("oracle", std::string("euler"));
    rp.out_dir = ov.out_dir ? *ov.out_dir : config.value("out_dir", std::string("."));
    rp.steps = config.value("steps", std::vector<long long>{64, 128, 256, 512, 1024, 2048, 4096});
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (ov.jobs) kernels::set_jobs(*ov.jobs);
  if (!(rp.tol > 0.0)) throw ParseError("tol must be > 0");
  if (rp.grid < 2) throw ParseError("grid must be >= 2");
  return rp;
}

std::string out_path(const RunParams& rp, const std::string& name) {
  return (std::filesystem::path(rp.out_dir) / name).string();
}

template <class S>
std::vector<Seminorm<S>> parse_candidates(const json& config, const AlgebraPtr<S>& a) {
  std::vector<Seminorm<S>> cands;
  if (config.contains("q_candidates")) {
    for (const auto& qj : config.at("q_candidates")) cands.push_back(parse_seminorm<S>(qj, a));
  } else if (config.contains("q")) {
    cands.push_back(parse_seminorm<S>(config.at("q"), a));
  }
  if (cands.empty()) throw ParseError("config needs \"q\" or a nonempty \"q_candidates\"");
  return cands;
}

template <class S>
StarCertificate<S> certify_from_config(const json& config, const RunParams& rp,
                                       const AlgebraPtr<S>& a, const Seminorm<S>& p) {
  CertifyOptions co;
  co.max_n = rp.max_n;
  co.mu.samples = rp.samples;
  co.mu.seed = rp.seed;
  return certify_star(p, parse_candidates(config, a), rp.max_n, co);
}

template <class S>
void do_certify(const json& config, const RunParams& rp) {
  const AlgebraPtr<S> a = parse_algebra<S>(config.at("algebra"));
  const Seminorm<S> p = parse_seminorm<S>(config.at("p"), a);
  const StarCertificate<S> cert = certify_from_config(config, rp, a, p);
  write_file(out_path(rp, "certificate.json"), certificate_json(cert).dump(2) + "\n");
}

template <class S>
void do_evolve(const json& config, const RunParams& rp) {
  const AlgebraPtr<S> a = parse_algebra<S>(config.at("algebra"));
  const Seminorm<S> p = parse_seminorm<S>(config.at("p"), a);
  const StarCertificate<S> cert = certify_from_config(config, rp, a, p);
  const Curve<S> gamma = parse_curve<S>(config.at("curve"), a);
  EvolveOptions eo;
  eo.grid = rp.grid;
  const EvolutionResult<S> res = evolve(gamma, p, cert, rp.tol, eo);
  write_file(out_path(rp, "certificate.json"), certificate_json(cert).dump(2) + "\n");
  write_file(out_path(rp, "evolution.json"), evolution_json(res).dump(2) + "\n");
  write_file(out_path(rp, "trajectory.csv"), trajectory_csv(res.eta, rp.grid));
}

}  // namespace

std::optional<double> fitted_order(const std::vector<std::pair<long long, double>>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [s, d] : rows)
    if (d > 0.0) pts.emplace_back(-std::log(static_cast<double>(s)), std::log(d));
  if (pts.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

namespace {

template <class S>
void do_compare(const json& config, const RunParams& rp) {
  const AlgebraPtr<S> a = parse_algebra<S>(config.at("algebra"));
  const Seminorm<S> p = parse_seminorm<S>(config.at("p"), a);
  const StarCertificate<S> cert = certify_from_config(config, rp, a, p);
  const Curve<S> gamma = parse_curve<S>(config.at("curve"), a);
  StepVariant variant;
  if (rp.oracle == "euler")
    variant = StepVariant::euler;
  else if (rp.oracle == "exp")
    variant = StepVariant::exponential;
  else
    throw ParseError("unknown oracle name: " + rp.oracle);

  EvolveOptions eo;
  eo.grid = rp.grid;
  const EvolutionResult<S> res = evolve(gamma, p, cert, rp.tol, eo);
  const Element<S> ref = res.eta.eval(1.0);

  std::vector<std::pair<long long, double>> rows;
  for (long long s : rp.steps) {
    const OracleResult<S> pr = step_product(gamma, s, variant);
    rows.emplace_back(s, p(*pr.element - ref));
  }
  const std::optional<double> order = fitted_order(rows);

  json j;
  j["oracle"] = rp.oracle;
  j["reference_depth"] = res.depth_used;
  j["rows"] = json::array();
  for (const auto& [s, d] : rows) j["rows"].push_back(json{{"steps", s}, {"discrepancy", d}});
  if (order)
    j["fitted_order"] = *order;
  else
    j["fitted_order"] = nullptr;
  write_file(out_path(rp, "compare.json"), j.dump(2) + "\n");

  std::string txt = "steps        discrepancy\n";
  char buf[64];
  for (const auto& [s, d] : rows) {
    std::snprintf(buf, sizeof buf, "%-12lld %.6e\n", s, d);
    txt += buf;
  }
  if (order) {
    std::snprintf(buf, sizeof buf, "fitted order: %.3f\n", *order);
    txt += buf;
  } else {
    txt += "fitted order: n/a\n";
  }
  write_file(out_path(rp, "compare.txt"), txt);
}

template <class S>
void do_mu_norm(const json& config, const RunParams& rp) {
  const AlgebraPtr<S> a = parse_algebra<S>(config.at("algebra"));
  const Seminorm<S> p = parse_seminorm<S>(config.at("p"), a);
  const Seminorm<S> q = parse_candidates(config, a).front();
  MuNormMode mode;
  if (rp.mode == "exact-vertex")
    mode = MuNormMode::exact_vertex;
  else if (rp.mode == "sampled")
    mode = MuNormMode::sampled;
  else if (rp.mode == "bound")
    mode = MuNormMode::bound;
  else
    throw ParseError("unknown mu-norm mode: " + rp.mode);
  MuNormOptions mo;
  mo.samples = rp.samples;
  mo.seed = rp.seed;
  const MuNormEstimate est = mu_norm(p, q, rp.n, mode, mo);
  json j;
  j["n"] = est.n;
  j["lower"] = est.lower;
  j["upper"] = std::isfinite(est.upper) ? json(est.upper) : json(nullptr);
  j["method"] = est.method;
  j["samples"] = est.samples;
  write_file(out_path(rp, "mu_norm.json"), j.dump(2) + "\n");
}

template <class F>
void dispatch(const json& config, F&& f) {
  if (config_field(config) == ScalarField::real)
    f(Real{});
  else
    f(Complex{});
}

}  // namespace

void cmd_certify(const json& config, const Overrides& ov) {
  const RunParams rp = merge(config, ov);
  dispatch(config, [&](auto tag) { do_certify<decltype(tag)>(config, rp); });
}

void cmd_evolve(const json& config, const Overrides& ov) {
  const RunParams rp = merge(config, ov);
  dispatch(config, [&](auto tag) { do_evolve<decltype(tag)>(config, rp); });
}

void cmd_compare(const json& config, const Overrides& ov) {
  const RunParams rp = merge(config, ov);
  dispatch(config, [&](auto tag) { do_compare<decltype(tag)>(config, rp); });
}

void cmd_mu_norm(const json& config, const Overrides& ov) {
  const RunParams rp = merge(config, ov);
  dispatch(config, [&](auto tag) { do_mu_norm<decltype(tag)>(config, rp); });
}

}  // namespace evolab::io
