#include "transop/experiments.hpp"

#include "transop/basis.hpp"
#include "transop/clustering.hpp"
#include "transop/error.hpp"
#include "transop/estimators.hpp"
#include "transop/graph.hpp"
#include "transop/io.hpp"
#include "transop/kernels.hpp"
#include "transop/operators.hpp"
#include "transop/spectral.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace transop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kReportedEigenvalues = 10;
constexpr double kDominantThreshold = 0.8;

class Stopwatch {
 public:
  void lap(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    laps_[name] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  json to_json() const {
    json j = laps_;
    j["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
#ifdef _OPENMP
    j["threads"] = omp_get_max_threads();
#else
    j["threads"] = 1;
#endif
    return j;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  std::chrono::steady_clock::time_point last_ = start_;
  std::map<std::string, double> laps_;
};

QuadrupleWellParams model_params(const ExperimentConfig& cfg) {
  QuadrupleWellParams p;
  p.beta = cfg.beta;
  p.c = cfg.c;
  p.tilt_max = cfg.tilt_max;
  p.tilt_horizon = cfg.tilt_horizon;
  p.tilt_window = cfg.tilt_window;
  p.validate();
  return p;
}

Box domain_of(const ExperimentConfig& cfg) { return square(cfg.lo, cfg.hi, 2); }

BoxPartition partition_of(const ExperimentConfig& cfg) {
  require(cfg.nx >= 1 && cfg.ny >= 1, Errc::precondition, "box counts must be positive");
  return BoxPartition(domain_of(cfg), {cfg.nx, cfg.ny});
}

std::vector<double> head(const Vector& v, Index count) {
  const Index n = std::min(count, v.size());
  return std::vector<double>(v.data(), v.data() + n);
}

Index count_at_least(const Vector& v, double threshold) {
  return static_cast<Index>((v.array() >= threshold).count());
}

/// Graph over all partition cells built from a matrix over retained cells.
Graph lift_graph(const Matrix& w, const std::vector<Index>& cells, Index n, bool directed) {
  std::vector<Edge> edges;
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = directed ? 0 : i; j < w.cols(); ++j) {
      if (w(i, j) > 0.0) {
        edges.push_back({cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(j)], w(i, j)});
      }
    }
  }
  return Graph::from_edges(n, edges, directed);
}

Partition lift_partition(const Partition& p, const std::vector<Index>& cells, Index n) {
  Partition out;
  out.m = p.m;
  out.labels.assign(static_cast<std::size_t>(n), Partition::unassigned);
  for (std::size_t r = 0; r < cells.size(); ++r) out.labels[static_cast<std::size_t>(cells[r])] = p.labels[r];
  return out;
}

void write_eigenvalues(const fs::path& path, const Vector& values) {
  std::string text = "index,value\n";
  for (Index i = 0; i < values.size(); ++i) {
    text += std::to_string(i + 1) + ',' + io::format_double(values[i]) + '\n';
  }
  io::write_text(path, text);
}

void write_complex_eigenvalues(const fs::path& path, const ComplexVector& values) {
  std::string text = "index,real,imag\n";
  for (Index i = 0; i < values.size(); ++i) {
    text += std::to_string(i + 1) + ',' + io::format_double(values[i].real()) + ',' +
            io::format_double(values[i].imag()) + '\n';
  }
  io::write_text(path, text);
}

json complex_list(const ComplexVector& v, Index count) {
  json out = json::array();
  for (Index i = 0; i < std::min(count, v.size()); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

json finish(const ExperimentConfig& cfg, json report, const Stopwatch& clock) {
  report["config"] = cfg.to_json();
  report["versions"] = version_info();
  report["seed"] = cfg.seed;
  report["timing"] = "timing.json";
  const fs::path out(cfg.out);
  io::write_json(out / "report.json", report);
  io::write_json(out / "timing.json", clock.to_json());
  return report;
}

PairDataset sample_quadruple_well(const ExperimentConfig& cfg) {
  const auto params = model_params(cfg);
  const SdeModel model = make_quadruple_well_model(params, domain_of(cfg));
  SamplingOptions opts;
  opts.lag = cfg.lag;
  opts.h = cfg.h;
  opts.m = cfg.samples;
  opts.seed = cfg.seed;
  opts.mode = parse_sample_mode(cfg.sample_mode);
  opts.burn_in_steps = cfg.burn_in;
  opts.init = quadruple_well_gibbs_sampler(params, domain_of(cfg));
  opts.exec = cfg.exec;
  return sample_pairs(model, opts);
}

int choose_k(const ExperimentConfig& cfg, const Vector& eigenvalues) {
  if (cfg.k > 0) return cfg.k;
  const Index top = std::min<Index>(kReportedEigenvalues, eigenvalues.size());
  if (top < 2) return 1;
  return static_cast<int>(spectral_gap(Vector(eigenvalues.head(top))));
}

KmeansResult cluster_rows(const ExperimentConfig& cfg, const Matrix& vectors, int k) {
  KmeansOptions opts;
  opts.k = k;
  opts.seed = cfg.seed;
  opts.row_normalize = cfg.row_normalize;
  opts.exec = cfg.exec;
  return kmeans(vectors.leftCols(k), opts);
}

json sizes_json(const Partition& p) {
  json out = json::array();
  for (Index s : p.block_sizes()) out.push_back(s);
  return out;
}

Index unassigned_count(const Partition& p) {
  return static_cast<Index>(std::count(p.labels.begin(), p.labels.end(), Partition::unassigned));
}

}  // namespace

json ExperimentConfig::to_json() const {
  return {{"experiment", experiment},
          {"beta", beta},
          {"c", c},
          {"tilt_max", tilt_max},
          {"tilt_horizon", tilt_horizon},
          {"tilt_window", tilt_window},
          {"boxes", {nx, ny}},
          {"domain", {lo, hi}},
          {"lag", lag},
          {"h", h},
          {"samples", samples},
          {"burn_in", burn_in},
          {"seed", seed},
          {"k", k},
          {"min_count", min_count},
          {"taus", taus},
          {"sample_mode", sample_mode},
          {"operator", operator_kind},
          {"omega", omega},
          {"directed", directed},
          {"layered", layered},
          {"row_normalize", row_normalize},
          {"ridge", ridge},
          {"bandwidth", bandwidth},
          {"input", input}};
}

ExperimentConfig defaults_for(const std::string& experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  if (experiment == "reversible") {
    cfg.operator_kind = "koopman";
  } else if (experiment == "nonreversible") {
    cfg.c = 2.0;
  } else if (experiment == "time-dependent") {
    cfg.beta = 5.0;
    cfg.tilt_max = 2.0;
    cfg.taus = {0.5, 1.0, 2.0, 3.0};
    cfg.sample_mode = "bursts";
  } else if (experiment == "graph-cluster" || experiment == "spectrum") {
    cfg.min_count = 1;
  } else if (experiment == "simulate" || experiment == "ulam" || experiment == "edmd") {
    cfg.min_count = 1;
  } else {
    fail(Errc::precondition, "unknown experiment '" + experiment + "'");
  }
  return cfg;
}

json version_info() {
  return {{"transop", TRANSOP_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#ifdef _OPENMP
          {"openmp", _OPENMP},
#endif
          {"compiler", __VERSION__}};
}

json run_reversible(const ExperimentConfig& cfg) {
  Stopwatch clock;
  const BoxPartition part = partition_of(cfg);
  const PairDataset data = sample_quadruple_well(cfg);
  clock.lap("sampling");
  const UlamResult u = ulam(data, part, cfg.min_count, cfg.exec);

  // Detailed balance makes the induced graph undirected; symmetrizing the
  // counts removes the sampling noise that breaks it.
  const Matrix w_sym = 0.5 * (u.counts + u.counts.transpose());
  const Graph g = Graph::from_dense(w_sym, false);
  const Vector pi = invariant_density(g, DensityMethod::degree_formula);
  const Matrix s = transition_matrix(g);
  const SpectralResult spec = selfadjoint_eigs(s, pi, s.rows());
  clock.lap("spectrum");

  const int k = choose_k(cfg, spec.eigenvalues);
  const KmeansResult km = cluster_rows(cfg, spec.eigenvectors, k);
  const double d = metastability_score(s, pi, km.partition);
  std::vector<double> deltas;
  for (int j = 1; j < k; ++j) deltas.push_back(projection_mass(spec.eigenvectors.col(j), km.partition, pi));
  std::vector<double> eigs = head(spec.eigenvalues, k + 1);
  const auto bounds = metastability_bounds(eigs, deltas, d, spec.eigenvalues[spec.eigenvalues.size() - 1]);
  clock.lap("clustering");

  const fs::path out(cfg.out);
  write_eigenvalues(out / "eigenvalues.csv", spec.eigenvalues);
  io::write_partition_csv(out / "partition.csv", lift_partition(km.partition, u.cells, part.size()));
  io::write_edge_list(out / "graph.edges", lift_graph(w_sym, u.cells, part.size(), false),
                      "symmetrized Ulam transition counts, vertex = box index");
  io::write_json(out / "partition.json", partition_to_json(part));

  json report = {
      {"experiment", "reversible"},
      {"eigenvalues", head(spec.eigenvalues, kReportedEigenvalues)},
      {"k", k},
      {"k_source", cfg.k > 0 ? "flag" : "spectral-gap"},
      {"cluster_sizes", sizes_json(km.partition)},
      {"kmeans", {{"distortion", km.distortion}, {"restart", km.restart}, {"iterations", km.iterations}}},
      {"metastability",
       {{"D", d},
        {"deltas", deltas},
        {"lower", bounds.lower},
        {"upper", bounds.upper},
        {"holds", bounds.holds},
        {"lower_valid", *bounds.lower_valid},
        {"holds_valid", *bounds.holds_valid}}},
      {"data",
       {{"pairs", data.size()}, {"discarded", data.discarded}, {"dropped_pairs", u.dropped_pairs}}},
      {"retained_cells", u.cells},
      {"residuals",
       {{"eigen_residual", spec.max_residual},
        {"eigen_tolerance", 1e-8},
        {"symmetry_defect", spec.symmetry_defect},
        {"row_sum_error", (s.rowwise().sum().array() - 1.0).abs().maxCoeff()}}}};
  return finish(cfg, std::move(report), clock);
}

json run_nonreversible(const ExperimentConfig& cfg) {
  Stopwatch clock;
  const BoxPartition part = partition_of(cfg);
  const PairDataset data = sample_quadruple_well(cfg);
  clock.lap("sampling");
  const UlamResult u = ulam(data, part, cfg.min_count, cfg.exec);
  const Matrix& k_mat = u.bundle.K;
  const ComplexSpectrum kspec = general_eigs(k_mat);
  double max_imag = 0.0;
  for (Index i = 0; i < kspec.eigenvalues.size(); ++i) max_imag = std::max(max_imag, std::abs(kspec.eigenvalues[i].imag()));

  const Density mu = Density::uniform(k_mat.rows());
  const OperatorBundle b = operator_bundle(k_mat, mu);
  const SpectralResult spec = selfadjoint_eigs(b.F, mu.values, b.F.rows());
  clock.lap("spectrum");

  const int k = choose_k(cfg, spec.eigenvalues);
  const KmeansResult km = cluster_rows(cfg, spec.eigenvectors, k);
  const double d = metastability_score(b.F, mu.values, km.partition);
  clock.lap("clustering");

  const fs::path out(cfg.out);
  write_eigenvalues(out / "eigenvalues.csv", spec.eigenvalues);
  write_complex_eigenvalues(out / "koopman_eigenvalues.csv", kspec.eigenvalues);
  io::write_partition_csv(out / "partition.csv", lift_partition(km.partition, u.cells, part.size()));
  io::write_edge_list(out / "graph.edges", lift_graph(u.counts, u.cells, part.size(), true),
                      "Ulam transition counts, vertex = box index");
  io::write_json(out / "partition.json", partition_to_json(part));

  json report = {
      {"experiment", "nonreversible"},
      {"eigenvalues", head(spec.eigenvalues, kReportedEigenvalues)},
      {"operator", "forward-backward"},
      {"density", "uniform"},
      {"koopman_eigenvalues", complex_list(kspec.eigenvalues, kReportedEigenvalues)},
      {"koopman_max_abs_imag", max_imag},
      {"k", k},
      {"k_source", cfg.k > 0 ? "flag" : "spectral-gap"},
      {"cluster_sizes", sizes_json(km.partition)},
      {"coherence_score", d},
      {"kmeans", {{"distortion", km.distortion}, {"restart", km.restart}, {"iterations", km.iterations}}},
      {"data",
       {{"pairs", data.size()}, {"discarded", data.discarded}, {"dropped_pairs", u.dropped_pairs}}},
      {"retained_cells", u.cells},
      {"residuals",
       {{"eigen_residual", spec.max_residual},
        {"eigen_tolerance", 1e-8},
        {"symmetry_defect", spec.symmetry_defect},
        {"koopman_residual", kspec.max_residual},
        {"koopman_tolerance", 1e-6},
        {"composition_error", max_abs(b.F - b.K * b.T)}}}};
  return finish(cfg, std::move(report), clock);
}

namespace {

struct LayeredSupport {
  std::vector<Index> cells;
  std::vector<Index> bursts;
};

// Cells occupied at every layer time by bursts that stay inside that cell set
// at every layer time; repeated until stable.
LayeredSupport common_support(const BurstSnapshots& snaps, const std::vector<std::size_t>& at,
                              const BoxPartition& part) {
  const Index m = snaps.states[0].rows();
  const Index n = part.size();
  std::vector<std::vector<Index>> where(at.size(), std::vector<Index>(static_cast<std::size_t>(m)));
  for (std::size_t l = 0; l < at.size(); ++l) {
    for (Index i = 0; i < m; ++i) {
      where[l][static_cast<std::size_t>(i)] = part.try_box_index(snaps.states[at[l]].row(i).data());
    }
  }
  std::vector<char> cell_ok(static_cast<std::size_t>(n), 1);
  std::vector<char> burst_ok(static_cast<std::size_t>(m), 1);
  for (;;) {
    for (Index i = 0; i < m; ++i) {
      if (!burst_ok[static_cast<std::size_t>(i)]) continue;
      for (std::size_t l = 0; l < at.size(); ++l) {
        const Index c = where[l][static_cast<std::size_t>(i)];
        if (c < 0 || !cell_ok[static_cast<std::size_t>(c)]) {
          burst_ok[static_cast<std::size_t>(i)] = 0;
          break;
        }
      }
    }
    std::vector<std::vector<char>> hit(at.size(), std::vector<char>(static_cast<std::size_t>(n), 0));
    for (Index i = 0; i < m; ++i) {
      if (!burst_ok[static_cast<std::size_t>(i)]) continue;
      for (std::size_t l = 0; l < at.size(); ++l) hit[l][static_cast<std::size_t>(where[l][static_cast<std::size_t>(i)])] = 1;
    }
    bool changed = false;
    for (Index c = 0; c < n; ++c) {
      bool all = true;
      for (std::size_t l = 0; l < at.size(); ++l) all = all && hit[l][static_cast<std::size_t>(c)];
      if (cell_ok[static_cast<std::size_t>(c)] && !all) {
        cell_ok[static_cast<std::size_t>(c)] = 0;
        changed = true;
      }
    }
    if (!changed) break;
  }
  LayeredSupport s;
  for (Index c = 0; c < n; ++c) {
    if (cell_ok[static_cast<std::size_t>(c)]) s.cells.push_back(c);
  }
  for (Index i = 0; i < m; ++i) {
    if (burst_ok[static_cast<std::size_t>(i)]) s.bursts.push_back(i);
  }
  require(!s.cells.empty(), Errc::empty_dataset, "no cell is occupied at every layer time");
  return s;
}

std::size_t snapshot_of(const std::vector<double>& times, double t) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  }
  fail(Errc::precondition, "time " + std::to_string(t) + " is not a snapshot time");
}

}  // namespace

json run_time_dependent(const ExperimentConfig& cfg) {
  Stopwatch clock;
  require(!cfg.taus.empty(), Errc::precondition, "the tau sweep is empty");
  std::vector<double> taus = cfg.taus;
  std::sort(taus.begin(), taus.end());
  require(taus.front() > 0.0, Errc::precondition, "sweep lags must be positive");
  const double horizon = taus.back();

  std::vector<double> layer_times{0.0};
  for (double t = 1.0; t < horizon - 1e-12; t += 1.0) layer_times.push_back(t);
  layer_times.push_back(horizon);
  std::vector<double> times = layer_times;
  times.insert(times.end(), taus.begin(), taus.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              times.end());

  const auto params = model_params(cfg);
  const Box domain = domain_of(cfg);
  const SdeModel model = make_quadruple_well_model(params, domain);
  const BoxPartition part = partition_of(cfg);
  require(cfg.samples >= 1, Errc::sampling_failure, "no bursts requested (samples = 0)");
  const BurstSnapshots snaps = simulate_bursts(model, quadruple_well_gibbs_sampler(params, domain), times,
                                               cfg.h, cfg.samples, cfg.seed, cfg.exec);
  clock.lap("sampling");

  json sweep = json::array();
  std::string csv = "tau,index,value\n";
  double worst_residual = 0.0;
  UlamResult last;
  SpectralResult last_spec;
  for (double tau : taus) {
    const PairDataset pairs = pairs_from_snapshots(snaps, 0, snapshot_of(times, tau), domain);
    require(2 * static_cast<std::size_t>(pairs.size()) >= cfg.samples, Errc::sampling_failure,
            "more than half of the bursts left the domain by tau = " + std::to_string(tau));
    UlamResult u = ulam(pairs, part, cfg.min_count, cfg.exec);
    SpectralResult spec = selfadjoint_eigs(u.bundle.F, u.bundle.mu, u.bundle.F.rows());
    worst_residual = std::max(worst_residual, spec.max_residual);
    for (Index i = 0; i < spec.eigenvalues.size(); ++i) {
      csv += io::format_double(tau) + ',' + std::to_string(i + 1) + ',' + io::format_double(spec.eigenvalues[i]) + '\n';
    }
    sweep.push_back({{"tau", tau},
                     {"eigenvalues", head(spec.eigenvalues, kReportedEigenvalues)},
                     {"dominant", count_at_least(spec.eigenvalues, kDominantThreshold)},
                     {"retained_cells", u.cells.size()},
                     {"discarded", pairs.discarded},
                     {"dropped_pairs", u.dropped_pairs}});
    last = std::move(u);
    last_spec = std::move(spec);
  }
  clock.lap("sweep");

  const int r = cfg.k > 0 ? cfg.k
                          : static_cast<int>(std::max<Index>(1, count_at_least(last_spec.eigenvalues, kDominantThreshold)));
  const SebaResult sb = seba(last_spec.eigenvectors.leftCols(r), last.bundle.mu);
  clock.lap("seba");

  // Layered variant: one Ulam graph per unit interval on a common support.
  std::vector<std::size_t> at;
  for (double t : layer_times) at.push_back(snapshot_of(times, t));
  const LayeredSupport support = common_support(snaps, at, part);
  const auto ns = static_cast<Index>(support.cells.size());
  std::vector<Index> pos(static_cast<std::size_t>(part.size()), -1);
  for (Index i = 0; i < ns; ++i) pos[static_cast<std::size_t>(support.cells[static_cast<std::size_t>(i)])] = i;
  LayeredGraph lg;
  Vector mu0 = Vector::Zero(ns);
  for (std::size_t l = 0; l + 1 < at.size(); ++l) {
    std::vector<Index> from, to;
    for (Index i : support.bursts) {
      from.push_back(pos[static_cast<std::size_t>(part.box_index(snaps.states[at[l]].row(i).data()))]);
      to.push_back(pos[static_cast<std::size_t>(part.box_index(snaps.states[at[l + 1]].row(i).data()))]);
    }
    const Matrix counts = cfg.exec == Exec::parallel ? kernels::count_transitions_omp(from, to, ns)
                                                      : kernels::count_transitions_serial(from, to, ns);
    if (l == 0) mu0 = counts.rowwise().sum();
    lg.layers.push_back(Graph::from_dense(counts, true));
    lg.times.push_back(layer_times[l]);
  }
  mu0 /= mu0.sum();
  const OperatorBundle layered = layered_forward_backward(lg, mu0);
  const SpectralResult layered_spec = selfadjoint_eigs(layered.F, mu0, ns);
  const Matrix supra = supra_laplacian(lg, cfg.omega, LaplacianKind::forward_backward, mu0);
  const ComplexSpectrum supra_spec = general_eigs(supra);
  std::vector<double> supra_low;
  for (Index i = 0; i < supra_spec.eigenvalues.size(); ++i) supra_low.push_back(supra_spec.eigenvalues[i].real());
  std::sort(supra_low.begin(), supra_low.end());
  supra_low.resize(std::min<std::size_t>(supra_low.size(), kReportedEigenvalues));
  double supra_imag = 0.0;
  for (Index i = 0; i < supra_spec.eigenvalues.size(); ++i) supra_imag = std::max(supra_imag, std::abs(supra_spec.eigenvalues[i].imag()));
  clock.lap("layered");

  const fs::path out(cfg.out);
  io::write_text(out / "eigenvalues.csv", csv);
  io::write_partition_csv(out / "partition.csv", lift_partition(sb.partition, last.cells, part.size()));
  io::write_matrix_csv(out / "memberships.csv", sb.memberships);
  io::write_edge_list(out / "graph.edges", lift_graph(last.counts, last.cells, part.size(), true),
                      "Ulam transition counts over [0, " + io::format_double(horizon) + "], vertex = box index");
  LayeredGraph lifted;
  for (std::size_t l = 0; l < lg.layers.size(); ++l) {
    lifted.layers.push_back(lift_graph(lg.layers[l].dense(), support.cells, part.size(), true));
    lifted.times.push_back(lg.times[l]);
  }
  io::write_layered_edge_list(out / "layers.edges", lifted, "per-interval Ulam counts, vertex = box index");
  io::write_json(out / "partition.json", partition_to_json(part));

  json counts = json::array();
  for (const auto& s : sweep) counts.push_back(s["dominant"]);
  json report = {
      {"experiment", "time-dependent"},
      {"sweep", sweep},
      {"dominant_counts", counts},
      {"dominant_threshold", kDominantThreshold},
      {"seba",
       {{"vectors", r},
        {"iterations", sb.iterations},
        {"cluster_sizes", sizes_json(sb.partition)},
        {"unassigned", unassigned_count(sb.partition)},
        {"retained_cells", last.cells}}},
      {"layered",
       {{"layer_times", layer_times},
        {"support_cells", ns},
        {"bursts_used", support.bursts.size()},
        {"forward_backward_eigenvalues", head(layered_spec.eigenvalues, kReportedEigenvalues)},
        {"supra_omega", cfg.omega},
        {"supra_laplacian_smallest", supra_low},
        {"supra_max_abs_imag", supra_imag}}},
      {"snapshot_times", times},
      {"residuals",
       {{"eigen_residual", worst_residual},
        {"eigen_tolerance", 1e-8},
        {"layered_residual", layered_spec.max_residual},
        {"supra_residual", supra_spec.max_residual}}}};
  return finish(cfg, std::move(report), clock);
}


namespace {

struct Embedding {
  Vector eigenvalues;   // real parts when the spectrum is complex
  ComplexVector values;
  Matrix vectors;       // eigenvectors (real parts)
  double max_imag = 0.0;
  double residual = 0.0;
  std::string method;
};

Embedding selfadjoint_embedding(const Matrix& a, const Vector& weight) {
  const SpectralResult s = selfadjoint_eigs(a, weight, a.rows());
  return {s.eigenvalues, s.eigenvalues.cast<std::complex<double>>(), s.eigenvectors, 0.0,
          s.max_residual, "selfadjoint"};
}

Embedding general_embedding(const Matrix& a) {
  const ComplexSpectrum s = general_eigs(a);
  Embedding e;
  e.eigenvalues = s.eigenvalues.real();
  e.values = s.eigenvalues;
  e.vectors = s.eigenvectors.real();
  e.max_imag = s.eigenvalues.imag().cwiseAbs().maxCoeff();
  e.residual = s.max_residual;
  e.method = "general";
  return e;
}

bool is_koopman(const std::string& op) { return op == "koopman" || op == "K"; }
bool is_forward_backward(const std::string& op) { return op == "forward-backward" || op == "F"; }

void require_input(const ExperimentConfig& cfg, const char* what) {
  require(!cfg.input.empty(), Errc::precondition, std::string("missing input ") + what);
  require(fs::exists(cfg.input), Errc::io, "input '" + cfg.input + "' does not exist");
}

}  // namespace

json graph_cluster(const ExperimentConfig& cfg) {
  Stopwatch clock;
  require_input(cfg, "edge list");
  const bool koopman = is_koopman(cfg.operator_kind);
  require(koopman || is_forward_backward(cfg.operator_kind), Errc::precondition,
          "operator must be koopman or forward-backward");
  json report = {{"experiment", "graph-cluster"}, {"operator", koopman ? "koopman" : "forward-backward"}};
  json warnings = json::array();
  Embedding emb;
  Matrix s;
  Vector weight;

  if (cfg.layered) {
    const LayeredGraph lg = io::read_layered_edge_list(cfg.input, cfg.directed);
    const Index n = lg.size();
    weight = Vector::Constant(n, 1.0 / static_cast<double>(n));
    const OperatorBundle b = layered_forward_backward(lg, weight);
    if (koopman) {
      warnings.push_back("layered input: clustering uses the forward-backward product, koopman only selects the supra-Laplacian kind");
    }
    emb = selfadjoint_embedding(b.F, weight);
    s = b.F;
    const Matrix supra = supra_laplacian(lg, cfg.omega, koopman ? LaplacianKind::random_walk : LaplacianKind::forward_backward, weight);
    const ComplexSpectrum ss = general_eigs(supra);
    std::vector<double> low;
    for (Index i = 0; i < ss.eigenvalues.size(); ++i) low.push_back(ss.eigenvalues[i].real());
    std::sort(low.begin(), low.end());
    low.resize(std::min<std::size_t>(low.size(), kReportedEigenvalues));
    report["layers"] = lg.layers.size();
    report["supra_laplacian_smallest"] = low;
    report["supra_omega"] = cfg.omega;
  } else {
    const Graph g = io::read_edge_list(cfg.input, cfg.directed);
    s = transition_matrix(g);
    const Index n = g.size();
    if (koopman && !g.directed()) {
      weight = out_degrees(g);
      weight /= weight.sum();
      emb = selfadjoint_embedding(s, weight);
      report["laplacian_eigenvalues"] = head((1.0 - emb.eigenvalues.array()).matrix(), kReportedEigenvalues);
    } else if (koopman) {
      weight = Vector::Constant(n, 1.0 / static_cast<double>(n));
      emb = general_embedding(s);
      if (emb.max_imag > 1e-10) {
        const std::string msg =
            "Koopman spectrum of this directed graph is complex (max |imag| = " +
            io::format_double(emb.max_imag) +
            "); spectral clustering on it is unreliable, rerun with --operator forward-backward";
        warnings.push_back(msg);
        std::cerr << "warning: " << msg << '\n';
      }
    } else {
      weight = Vector::Constant(n, 1.0 / static_cast<double>(n));
      const OperatorBundle b = operator_bundle(s, Density::uniform(n));
      emb = selfadjoint_embedding(b.F, weight);
      s = b.F;
    }
    report["directed"] = g.directed();
  }
  clock.lap("spectrum");

  const int k = choose_k(cfg, emb.eigenvalues);
  require(k <= emb.vectors.cols(), Errc::precondition, "k exceeds the number of vertices");
  const KmeansResult km = cluster_rows(cfg, emb.vectors, k);
  clock.lap("clustering");

  const fs::path out(cfg.out);
  write_eigenvalues(out / "eigenvalues.csv", emb.eigenvalues);
  io::write_partition_csv(out / "partition.csv", km.partition);
  report["eigenvalues"] = head(emb.eigenvalues, kReportedEigenvalues);
  report["eigen_method"] = emb.method;
  report["max_abs_imag"] = emb.max_imag;
  report["k"] = k;
  report["k_source"] = cfg.k > 0 ? "flag" : "spectral-gap";
  report["cluster_sizes"] = sizes_json(km.partition);
  report["warnings"] = warnings;
  report["residuals"] = {{"eigen_residual", emb.residual}};
  if (!koopman || !cfg.directed) report["metastability_score"] = metastability_score(s, weight, km.partition);
  return finish(cfg, std::move(report), clock);
}

json run_simulate(const ExperimentConfig& cfg) {
  Stopwatch clock;
  const PairDataset data = sample_quadruple_well(cfg);
  clock.lap("sampling");
  const fs::path out(cfg.out);
  io::write_pair_dataset(out / "pairs.csv", data);
  json report = {{"experiment", "simulate"},
                 {"pairs", data.size()},
                 {"discarded", data.discarded},
                 {"lag", data.lag},
                 {"mode", to_string(data.mode)},
                 {"files", {"pairs.csv", "pairs.json"}}};
  return finish(cfg, std::move(report), clock);
}

json run_ulam(const ExperimentConfig& cfg) {
  Stopwatch clock;
  require_input(cfg, "pair dataset");
  const PairDataset data = io::read_pair_dataset(cfg.input);
  const BoxPartition part = partition_of(cfg);
  const UlamResult u = ulam(data, part, cfg.min_count, cfg.exec);
  clock.lap("estimation");
  const fs::path out(cfg.out);
  io::write_bundle(out / "bundle", u.bundle,
                   {{"cells", u.cells}, {"dropped_pairs", u.dropped_pairs}, {"partition", partition_to_json(part)}});
  io::write_edge_list(out / "graph.edges", lift_graph(u.counts, u.cells, part.size(), true),
                      "Ulam transition counts, vertex = box index");
  io::write_json(out / "partition.json", partition_to_json(part));
  json report = {{"experiment", "ulam"},
                 {"pairs", data.size()},
                 {"retained_cells", u.cells.size()},
                 {"dropped_pairs", u.dropped_pairs},
                 {"residuals",
                  {{"row_sum_error", (u.bundle.K.rowwise().sum().array() - 1.0).abs().maxCoeff()},
                   {"composition_error", max_abs(u.bundle.F - u.bundle.K * u.bundle.T)}}}};
  return finish(cfg, std::move(report), clock);
}

json run_edmd(const ExperimentConfig& cfg) {
  Stopwatch clock;
  require_input(cfg, "pair dataset");
  const PairDataset data = io::read_pair_dataset(cfg.input);
  const BoxPartition part = partition_of(cfg);
  const bool indicator = cfg.bandwidth <= 0.0;
  BasisSet basis = [&] {
    if (indicator) return BasisSet(part);
    GaussianDictionary dict;
    dict.bandwidth = cfg.bandwidth;
    dict.centers.resize(part.size(), part.dimension());
    for (Index i = 0; i < part.size(); ++i) dict.centers.row(i) = part.cell_center(i).transpose();
    return BasisSet(std::move(dict));
  }();
  const CovarianceSet cov =
      covariances(evaluate_basis(basis, data.xs), evaluate_basis(basis, data.ys), cfg.exec);
  const OperatorBundle b = edmd(cov, indicator ? 0.0 : cfg.ridge, indicator);
  clock.lap("estimation");
  const fs::path out(cfg.out);
  io::write_bundle(out / "bundle", b,
                   {{"basis", indicator ? "indicator" : "gaussian"},
                    {"bandwidth", cfg.bandwidth},
                    {"ridge", indicator ? 0.0 : cfg.ridge},
                    {"partition", partition_to_json(part)}});
  json report = {{"experiment", "edmd"},
                 {"pairs", data.size()},
                 {"basis", indicator ? "indicator" : "gaussian"},
                 {"size", b.size()},
                 {"residuals",
                  {{"adjointness_error", max_abs(cov.yy * b.T - (cov.xx * b.K).transpose())},
                   {"composition_error", max_abs(b.F - b.K * b.T)}}}};
  return finish(cfg, std::move(report), clock);
}

json run_spectrum(const ExperimentConfig& cfg) {
  Stopwatch clock;
  require_input(cfg, "bundle directory or edge list");
  OperatorBundle b;
  Vector pi;
  if (fs::is_directory(cfg.input)) {
    b = io::read_bundle(cfg.input);
  } else {
    const Graph g = io::read_edge_list(cfg.input, cfg.directed);
    b = operator_bundle(transition_matrix(g), Density::uniform(g.size()));
    if (!g.directed()) pi = out_degrees(g) / out_degrees(g).sum();
  }
  const std::string& op = cfg.operator_kind;
  Embedding emb;
  if (is_forward_backward(op)) {
    emb = b.mu.size() ? selfadjoint_embedding(b.F, b.mu) : general_embedding(b.F);
  } else if (op == "backward-forward" || op == "B") {
    emb = b.nu.size() ? selfadjoint_embedding(b.B, b.nu) : general_embedding(b.B);
  } else if (is_koopman(op)) {
    emb = pi.size() ? selfadjoint_embedding(b.K, pi) : general_embedding(b.K);
  } else if (op == "T" || op == "reweighted") {
    emb = general_embedding(b.T);
  } else if (op == "P" || op == "perron-frobenius") {
    emb = general_embedding(b.P);
  } else {
    fail(Errc::precondition, "unknown operator '" + op + "'");
  }
  clock.lap("spectrum");
  const fs::path out(cfg.out);
  write_complex_eigenvalues(out / "eigenvalues.csv", emb.values);
  json report = {{"experiment", "spectrum"},
                 {"operator", op},
                 {"eigen_method", emb.method},
                 {"eigenvalues", head(emb.eigenvalues, kReportedEigenvalues)},
                 {"max_abs_imag", emb.max_imag},
                 {"suggested_k", emb.eigenvalues.size() >= 2 ? choose_k(cfg, emb.eigenvalues) : 1},
                 {"residuals", {{"eigen_residual", emb.residual}}}};
  return finish(cfg, std::move(report), clock);
}

}  // namespace transop
