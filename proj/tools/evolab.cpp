#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "evolab/io.hpp"

// Exit codes are a stable contract: 0 ok, 1 parse/config, 2 certification
// failure, 3 depth cap, 4 numerical breakdown.

int main(int argc, char** argv) {
  CLI::App app{"growth certificates and evolution trajectories in finite-dimensional unital algebras"};
  app.require_subcommand(1);

  std::string config_path;
  evolab::io::Overrides ov;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON config file")->required();
    sub->add_option_function<double>(
        "--tol", [&](const double& v) { ov.tol = v; }, "evolution tolerance");
    sub->add_option_function<int>(
        "--grid", [&](const int& v) { ov.grid = v; }, "check/output grid resolution");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { ov.seed = v; }, "sampling seed");
    sub->add_option_function<std::string>(
        "--out-dir", [&](const std::string& v) { ov.out_dir = v; }, "output directory");
    sub->add_option_function<std::string>(
        "--oracle", [&](const std::string& v) { ov.oracle = v; },
        "step-product oracle: euler | exp");
    sub->add_option_function<int>(
        "--jobs", [&](const int& v) { ov.jobs = v; }, "worker thread count");
    sub->add_option_function<long long>(
        "--samples", [&](const long long& v) { ov.samples = v; }, "sampling budget");
    sub->add_option_function<int>(
        "--max-n", [&](const int& v) { ov.max_n = v; }, "largest certified arity");
  };

  CLI::App* certify = app.add_subcommand("certify", "certify the growth condition, write certificate.json");
  CLI::App* evolve = app.add_subcommand("evolve", "run the evolution, write trajectory.csv + JSON reports");
  CLI::App* compare = app.add_subcommand("compare", "step-product oracle convergence table");
  CLI::App* mu = app.add_subcommand("mu-norm", "estimate one multiplication-map norm");
  add_common(certify);
  add_common(evolve);
  add_common(compare);
  add_common(mu);
  mu->add_option_function<int>(
      "--n", [&](const int& v) { ov.n = v; }, "arity");
  mu->add_option_function<std::string>(
      "--mode", [&](const std::string& v) { ov.mode = v; },
      "exact-vertex | sampled | bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const evolab::io::json config = evolab::io::load_json_file(config_path);
    if (certify->parsed()) evolab::io::cmd_certify(config, ov);
    if (evolve->parsed()) evolab::io::cmd_evolve(config, ov);
    if (compare->parsed()) evolab::io::cmd_compare(config, ov);
    if (mu->parsed()) evolab::io::cmd_mu_norm(config, ov);
    return 0;
  } catch (const evolab::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const evolab::CertificationFailure& e) {
    std::fprintf(stderr, "certification failure: %s\n", e.what());
    return 2;
  } catch (const evolab::DepthCapExceeded& e) {
    std::fprintf(stderr, "depth cap: %s\n", e.what());
    return 3;
  } catch (const evolab::NumericalBreakdown& e) {
    std::fprintf(stderr, "numerical breakdown: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
