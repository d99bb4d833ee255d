#include "transop/error.hpp"
#include "transop/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using transop::ExperimentConfig;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::optional<double> beta, c, lag, h, omega, tilt_max, tilt_horizon, ridge, bandwidth;
  std::optional<std::vector<long>> boxes;
  std::optional<std::size_t> samples, burn_in;
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
  std::optional<long> min_count;
  std::optional<std::vector<double>> taus;
  std::optional<std::string> op, out, mode, input;
  bool directed = false;
  bool layered = false;
  bool serial = false;
  bool row_normalize = false;
};

void common(CLI::App* app, Flags& f) {
  app->add_option("--out", f.out, "Output directory")->type_name("DIR");
  app->add_option("--seed", f.seed, "RNG seed");
  app->add_flag("--serial", f.serial, "Use the serial reference kernels");
}

void model(CLI::App* app, Flags& f) {
  app->add_option("--beta", f.beta, "Inverse temperature");
  app->add_option("--c", f.c, "Non-reversibility strength");
  app->add_option("--tilt-max", f.tilt_max, "Ceiling of the time-dependent tilt");
  app->add_option("--tilt-horizon", f.tilt_horizon, "Time at which the tilt stops growing");
  app->add_option("--lag", f.lag, "Lag time tau");
  app->add_option("--step", f.h, "Euler-Maruyama step h");
  app->add_option("--samples", f.samples, "Number of pairs or bursts");
  app->add_option("--burn-in", f.burn_in, "Burn-in steps of the long trajectory");
  app->add_option("--mode", f.mode, "long-trajectory or bursts");
}

void boxes(CLI::App* app, Flags& f) {
  app->add_option("--boxes", f.boxes, "Boxes per axis")->expected(2)->type_name("NX NY");
  app->add_option("--min-count", f.min_count, "Minimum start count for a retained box");
}

void clustering(CLI::App* app, Flags& f) {
  app->add_option("--k", f.k, "Number of clusters (default: spectral gap)");
  app->add_flag("--row-normalize", f.row_normalize, "Normalize embedding rows before k-means");
}

ExperimentConfig resolve(const std::string& experiment, const Flags& f) {
  ExperimentConfig cfg = transop::defaults_for(experiment);
  if (f.beta) cfg.beta = *f.beta;
  if (f.c) cfg.c = *f.c;
  if (f.lag) cfg.lag = *f.lag;
  if (f.h) cfg.h = *f.h;
  if (f.omega) cfg.omega = *f.omega;
  if (f.tilt_max) cfg.tilt_max = *f.tilt_max;
  if (f.tilt_horizon) cfg.tilt_horizon = *f.tilt_horizon;
  if (f.ridge) cfg.ridge = *f.ridge;
  if (f.bandwidth) cfg.bandwidth = *f.bandwidth;
  if (f.boxes) {
    cfg.nx = (*f.boxes)[0];
    cfg.ny = (*f.boxes)[1];
  }
  if (f.samples) cfg.samples = *f.samples;
  if (f.burn_in) cfg.burn_in = *f.burn_in;
  if (f.seed) cfg.seed = *f.seed;
  if (f.k) cfg.k = *f.k;
  if (f.min_count) cfg.min_count = *f.min_count;
  if (f.taus) cfg.taus = *f.taus;
  if (f.op) cfg.operator_kind = *f.op;
  if (f.out) cfg.out = *f.out;
  if (f.mode) cfg.sample_mode = *f.mode;
  if (f.input) cfg.input = *f.input;
  cfg.directed = f.directed;
  cfg.layered = f.layered;
  cfg.row_normalize = f.row_normalize;
  if (f.serial) cfg.exec = transop::Exec::serial;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transfer operators on stochastic dynamics and graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TRANSOP_VERSION);
  Flags f;

  auto* simulate = app.add_subcommand("simulate", "Sample lag-tau pairs from the quadruple well");
  common(simulate, f);
  model(simulate, f);

  auto* ulam = app.add_subcommand("ulam", "Ulam estimate of all operators from a pair CSV");
  common(ulam, f);
  boxes(ulam, f);
  ulam->add_option("input", f.input, "Pair dataset CSV")->required();

  auto* edmd = app.add_subcommand("edmd", "EDMD estimate with an indicator or Gaussian basis");
  common(edmd, f);
  boxes(edmd, f);
  edmd->add_option("input", f.input, "Pair dataset CSV")->required();
  edmd->add_option("--bandwidth", f.bandwidth, "Gaussian bandwidth; omit for indicator basis");
  edmd->add_option("--ridge", f.ridge, "Tikhonov ridge for smooth bases");

  auto* cluster = app.add_subcommand("graph-cluster", "Spectral clustering of an edge list");
  common(cluster, f);
  clustering(cluster, f);
  cluster->add_option("input", f.input, "Edge list file")->required();
  cluster->add_option("--operator", f.op, "koopman or forward-backward");
  cluster->add_option("--omega", f.omega, "Inter-layer coupling of the supra-Laplacian");
  cluster->add_flag("--directed", f.directed, "Treat edges as directed");
  cluster->add_flag("--layered", f.layered, "Input is a layered edge list");

  auto* spectrum = app.add_subcommand("spectrum", "Spectrum of one operator of a bundle or graph");
  common(spectrum, f);
  spectrum->add_option("input", f.input, "Bundle directory or edge list")->required();
  spectrum->add_option("--operator", f.op, "koopman, forward-backward, backward-forward, T or P");
  spectrum->add_option("--k", f.k, "Fixed k for the reported suggestion");
  spectrum->add_flag("--directed", f.directed, "Treat edges as directed");

  auto* reproduce = app.add_subcommand("reproduce", "Run one of the quadruple-well experiments");
  std::string figure;
  reproduce->add_option("figure", figure, "fig4, fig6 or fig7")
      ->required()
      ->check(CLI::IsMember({"fig4", "fig6", "fig7"}));
  common(reproduce, f);
  model(reproduce, f);
  boxes(reproduce, f);
  clustering(reproduce, f);
  reproduce->add_option("--taus", f.taus, "Lag sweep of the time-dependent run");
  reproduce->add_option("--omega", f.omega, "Inter-layer coupling of the supra-Laplacian");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitPrecondition;
  }

  try {
    nlohmann::json report;
    if (simulate->parsed()) {
      report = transop::run_simulate(resolve("simulate", f));
    } else if (ulam->parsed()) {
      report = transop::run_ulam(resolve("ulam", f));
    } else if (edmd->parsed()) {
      report = transop::run_edmd(resolve("edmd", f));
    } else if (cluster->parsed()) {
      report = transop::graph_cluster(resolve("graph-cluster", f));
    } else if (spectrum->parsed()) {
      report = transop::run_spectrum(resolve("spectrum", f));
    } else if (figure == "fig4") {
      report = transop::run_reversible(resolve("reversible", f));
    } else if (figure == "fig6") {
      report = transop::run_nonreversible(resolve("nonreversible", f));
    } else {
      report = transop::run_time_dependent(resolve("time-dependent", f));
    }
    std::cout << "wrote " << report["config"]["experiment"].get<std::string>() << " results to "
              << (f.out ? *f.out : std::string("out")) << '\n';
    if (report.contains("eigenvalues") && report["eigenvalues"].is_array()) {
      std::cout << "leading eigenvalues:";
      for (const auto& v : report["eigenvalues"]) std::cout << ' ' << v.get<double>();
      std::cout << '\n';
    }
    return 0;
  } catch (const transop::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.numerical() ? kExitNumerical : kExitPrecondition;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: io: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
