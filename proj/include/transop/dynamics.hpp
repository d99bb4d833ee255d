#pragma once

#include "transop/linalg.hpp"
#include "transop/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace transop {

/// out = f(x, t); out has the state dimension.
using VectorField = std::function<void(std::span<const double> x, double t, std::span<double> out)>;
/// out = sigma(x, t) as a row-major d x d matrix.
using MatrixField = std::function<void(std::span<const double> x, double t, std::span<double> out)>;

/// dX = b(X, t) dt + sigma(X, t) dW on a bounded box.
struct SdeModel {
  int dimension = 0;
  Box domain;
  VectorField drift;
  MatrixField diffusion;
  /// When set, sigma == isotropic_noise * I and `diffusion` is not consulted.
  std::optional<double> isotropic_noise;
};

/// Quadruple-well family: V(x) = V1(x1) + V2(x2) plus an optional
/// time-dependent tilt confined to the upper-right quadrant, with drift
/// (M - I) grad V, M = [[0, c], [-c, 0]].
struct QuadrupleWellParams {
  double beta = 3.0;
  double c = 0.0;
  /// Tilt ceiling gamma_max; gamma(t) = tilt_max * min(t, tilt_horizon) / tilt_horizon.
  double tilt_max = 0.0;
  double tilt_horizon = 3.0;
  /// Steepness k of the logistic window s(k x1) s(k x2) that localizes the tilt.
  double tilt_window = 4.0;

  void validate() const;
};

double tilt_strength(const QuadrupleWellParams& p, double t);

double quadruple_well_potential(const QuadrupleWellParams& p, const Eigen::Vector2d& x, double t);
Eigen::Vector2d quadruple_well_gradient(const QuadrupleWellParams& p, const Eigen::Vector2d& x,
                                        double t);
Eigen::Vector2d quadruple_well_drift(const QuadrupleWellParams& p, const Eigen::Vector2d& x,
                                     double t);

/// Stationary probability flux M grad V exp(-beta V), without the 1/Z factor.
/// Only defined for the autonomous model (tilt_max == 0).
Eigen::Vector2d stationary_flux(const QuadrupleWellParams& p, const Eigen::Vector2d& x);

/// Default domain [-1.75, 1.75]^2.
Box quadruple_well_domain();

SdeModel make_quadruple_well_model(const QuadrupleWellParams& p,
                                   const Box& domain = quadruple_well_domain());

/// Euler-Maruyama with preallocated buffers. Not thread-safe; one per worker.
class EulerMaruyama {
 public:
  EulerMaruyama(const SdeModel& model, double h);

  /// x <- x + b(x,t) h + sigma(x,t) sqrt(h) xi.
  void step(std::span<double> x, double t, std::span<const double> xi);
  /// Same, drawing xi from rng.
  void step(std::span<double> x, double t, Rng& rng);

  double h() const { return h_; }

 private:
  const SdeModel* model_;
  double h_;
  double sqrt_h_;
  std::vector<double> drift_;
  std::vector<double> sigma_;
  std::vector<double> xi_;
};

Vector euler_maruyama_step(const SdeModel& model, const Vector& x, double t, double h,
                           const Vector& xi);

/// Draws one initial state into `out`.
using InitSampler = std::function<void(Rng& rng, std::span<double> out)>;

InitSampler point_sampler(Vector x0);
InitSampler uniform_sampler(Box domain);
/// Rejection sampler for exp(-beta (V - v_min)) restricted to `domain`.
InitSampler gibbs_sampler(std::function<double(std::span<const double>)> potential, double beta,
                          Box domain, double v_min);
InitSampler quadruple_well_gibbs_sampler(const QuadrupleWellParams& p,
                                         const Box& domain = quadruple_well_domain());

enum class SampleMode { long_trajectory, bursts };

std::string to_string(SampleMode mode);
SampleMode parse_sample_mode(const std::string& s);

enum class Exec { serial, parallel };

struct SamplingOptions {
  double lag = 0.1;
  double h = 1e-3;
  std::size_t m = 1;
  std::uint64_t seed = 0;
  SampleMode mode = SampleMode::long_trajectory;
  std::size_t burn_in_steps = 10000;
  double t0 = 0.0;
  InitSampler init;
  Exec exec = Exec::parallel;
};

struct PairDataset {
  Samples xs;
  Samples ys;
  double lag = 0.0;
  std::uint64_t seed = 0;
  std::size_t discarded = 0;
  SampleMode mode = SampleMode::long_trajectory;

  Index size() const { return xs.rows(); }
  Index dimension() const { return xs.cols(); }
};

/// Number of h-steps covering `duration`; throws precondition if not an
/// integer multiple within 1e-12 relative tolerance.
std::size_t steps_for(double duration, double h);

PairDataset sample_pairs(const SdeModel& model, const SamplingOptions& opts);

/// States of m independent bursts at each of `times` (times[0] is the start).
struct BurstSnapshots {
  std::vector<double> times;
  std::vector<Samples> states;
  std::uint64_t seed = 0;
};

BurstSnapshots simulate_bursts(const SdeModel& model, const InitSampler& init,
                               std::span<const double> times, double h, std::size_t m,
                               std::uint64_t seed, Exec exec = Exec::parallel);

/// Pairs (states[from], states[to]) with out-of-domain endpoints discarded.
PairDataset pairs_from_snapshots(const BurstSnapshots& snaps, std::size_t from, std::size_t to,
                                 const Box& domain);

}  // namespace transop
