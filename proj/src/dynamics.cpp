#include "transop/dynamics.hpp"

#include "transop/error.hpp"
#include "transop/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace transop {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// 1D factors of the quadruple-well potential and their derivatives.
double v1(double x) { return x * x * x * x - x * x * x / 16.0 - 2.0 * x * x + 3.0 * x / 16.0 + 9.0 / 8.0; }
double v2(double x) { return x * x * x * x - x * x * x / 8.0 - 2.0 * x * x + 3.0 * x / 8.0 + 5.0 / 4.0; }
double dv1(double x) { return 4.0 * x * x * x - 3.0 * x * x / 16.0 - 4.0 * x + 3.0 / 16.0; }
double dv2(double x) { return 4.0 * x * x * x - 3.0 * x * x / 8.0 - 4.0 * x + 3.0 / 8.0; }

void gradient_into(const QuadrupleWellParams& p, double x1, double x2, double t, double& g1,
                   double& g2) {
  g1 = dv1(x1);
  g2 = dv2(x2);
  const double gamma = tilt_strength(p, t);
  if (gamma != 0.0) {
    const double k = p.tilt_window;
    const double s1 = logistic(k * x1);
    const double s2 = logistic(k * x2);
    const double q = x1 + x2;
    g1 += gamma * (s1 * s2 + q * k * s1 * (1.0 - s1) * s2);
    g2 += gamma * (s1 * s2 + q * k * s2 * (1.0 - s2) * s1);
  }
}

std::string format_state(std::span<const double> x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

}  // namespace

void QuadrupleWellParams::validate() const {
  require(beta > 0.0 && std::isfinite(beta), Errc::precondition, "beta must be positive");
  require(tilt_horizon > 0.0, Errc::precondition, "tilt_horizon must be positive");
  require(std::isfinite(c) && std::isfinite(tilt_max) && tilt_window > 0.0, Errc::precondition,
          "quadruple-well parameters must be finite");
}

double tilt_strength(const QuadrupleWellParams& p, double t) {
  if (p.tilt_max == 0.0) return 0.0;
  return p.tilt_max * std::min(std::max(t, 0.0), p.tilt_horizon) / p.tilt_horizon;
}

double quadruple_well_potential(const QuadrupleWellParams& p, const Eigen::Vector2d& x, double t) {
  double v = v1(x[0]) + v2(x[1]);
  const double gamma = tilt_strength(p, t);
  if (gamma != 0.0) {
    v += gamma * (x[0] + x[1]) * logistic(p.tilt_window * x[0]) * logistic(p.tilt_window * x[1]);
  }
  return v;
}

Eigen::Vector2d quadruple_well_gradient(const QuadrupleWellParams& p, const Eigen::Vector2d& x,
                                        double t) {
  Eigen::Vector2d g;
  gradient_into(p, x[0], x[1], t, g[0], g[1]);
  return g;
}

Eigen::Vector2d quadruple_well_drift(const QuadrupleWellParams& p, const Eigen::Vector2d& x,
                                     double t) {
  const Eigen::Vector2d g = quadruple_well_gradient(p, x, t);
  // (M - I) g with M = [[0, c], [-c, 0]]
  return {-g[0] + p.c * g[1], -g[1] - p.c * g[0]};
}

Eigen::Vector2d stationary_flux(const QuadrupleWellParams& p, const Eigen::Vector2d& x) {
  require(p.tilt_max == 0.0, Errc::unsupported_configuration,
          "stationary flux is only defined for the autonomous model (tilt_max = 0)");
  if (p.c == 0.0) return Eigen::Vector2d::Zero();
  const Eigen::Vector2d g = quadruple_well_gradient(p, x, 0.0);
  const double w = std::exp(-p.beta * quadruple_well_potential(p, x, 0.0));
  return Eigen::Vector2d(p.c * g[1], -p.c * g[0]) * w;
}

Box quadruple_well_domain() { return square(-1.75, 1.75, 2); }

SdeModel make_quadruple_well_model(const QuadrupleWellParams& p, const Box& domain) {
  p.validate();
  require(domain.dimension() == 2, Errc::shape_mismatch, "quadruple well is two-dimensional");
  SdeModel model;
  model.dimension = 2;
  model.domain = domain;
  model.drift = [p](std::span<const double> x, double t, std::span<double> out) {
    double g1 = 0.0;
    double g2 = 0.0;
    gradient_into(p, x[0], x[1], t, g1, g2);
    out[0] = -g1 + p.c * g2;
    out[1] = -g2 - p.c * g1;
  };
  model.isotropic_noise = std::sqrt(2.0 / p.beta);
  return model;
}

EulerMaruyama::EulerMaruyama(const SdeModel& model, double h)
    : model_(&model),
      h_(h),
      sqrt_h_(std::sqrt(h)),
      drift_(static_cast<std::size_t>(model.dimension)),
      sigma_(model.isotropic_noise ? 0 : static_cast<std::size_t>(model.dimension * model.dimension)),
      xi_(static_cast<std::size_t>(model.dimension)) {
  require(h > 0.0, Errc::precondition, "step size h must be positive");
  require(model.dimension > 0 && model.drift, Errc::precondition, "model has no drift");
  require(model.isotropic_noise.has_value() || static_cast<bool>(model.diffusion),
          Errc::precondition, "model has no diffusion");
}

void EulerMaruyama::step(std::span<double> x, double t, std::span<const double> xi) {
  const auto d = static_cast<std::size_t>(model_->dimension);
  model_->drift(x, t, drift_);
  bool finite = true;
  if (model_->isotropic_noise) {
    const double s = *model_->isotropic_noise * sqrt_h_;
    for (std::size_t i = 0; i < d; ++i) {
      x[i] += drift_[i] * h_ + s * xi[i];
      finite = finite && std::isfinite(x[i]);
    }
  } else {
    model_->diffusion(x, t, sigma_);
    for (std::size_t i = 0; i < d; ++i) {
      double noise = 0.0;
      for (std::size_t j = 0; j < d; ++j) noise += sigma_[i * d + j] * xi[j];
      x[i] += drift_[i] * h_ + sqrt_h_ * noise;
      finite = finite && std::isfinite(x[i]);
    }
  }
  if (!finite) {
    fail(Errc::non_finite, "Euler-Maruyama step produced a non-finite state " + format_state(x) +
                               " at t = " + std::to_string(t));
  }
}

void EulerMaruyama::step(std::span<double> x, double t, Rng& rng) {
  for (double& v : xi_) v = rng.normal();
  step(x, t, xi_);
}

Vector euler_maruyama_step(const SdeModel& model, const Vector& x, double t, double h,
                           const Vector& xi) {
  require(x.size() == model.dimension && xi.size() == model.dimension, Errc::shape_mismatch,
          "state and noise must match the model dimension");
  EulerMaruyama em(model, h);
  Vector out = x;
  em.step(std::span<double>(out.data(), static_cast<std::size_t>(out.size())), t,
          std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
  return out;
}

InitSampler point_sampler(Vector x0) {
  return [x0 = std::move(x0)](Rng&, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x0[static_cast<Index>(i)];
  };
}

InitSampler uniform_sampler(Box domain) {
  return [domain = std::move(domain)](Rng& rng, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto k = static_cast<Index>(i);
      out[i] = rng.uniform(domain.lower[k], domain.upper[k]);
    }
  };
}

InitSampler gibbs_sampler(std::function<double(std::span<const double>)> potential, double beta,
                          Box domain, double v_min) {
  require(beta > 0.0, Errc::precondition, "beta must be positive");
  return [potential = std::move(potential), beta, domain = std::move(domain), v_min](
             Rng& rng, std::span<double> out) {
    constexpr long max_attempts = 100'000'000;
    for (long attempt = 0; attempt < max_attempts; ++attempt) {
      for (std::size_t i = 0; i < out.size(); ++i) {
        const auto k = static_cast<Index>(i);
        out[i] = rng.uniform(domain.lower[k], domain.upper[k]);
      }
      const double accept = std::exp(-beta * (potential(out) - v_min));
      if (rng.uniform() < accept) return;
    }
    fail(Errc::sampling_failure, "Gibbs rejection sampler exhausted its attempt budget");
  };
}

InitSampler quadruple_well_gibbs_sampler(const QuadrupleWellParams& p, const Box& domain) {
  // Gibbs density of the t = 0 potential; its minimum over R^2 is V(-1,-1) = 0.
  QuadrupleWellParams at_zero = p;
  return gibbs_sampler(
      [at_zero](std::span<const double> x) {
        return quadruple_well_potential(at_zero, Eigen::Vector2d(x[0], x[1]), 0.0);
      },
      p.beta, domain, 0.0);
}

std::string to_string(SampleMode mode) {
  return mode == SampleMode::long_trajectory ? "long-trajectory" : "bursts";
}

SampleMode parse_sample_mode(const std::string& s) {
  if (s == "long-trajectory" || s == "trajectory") return SampleMode::long_trajectory;
  if (s == "bursts") return SampleMode::bursts;
  fail(Errc::precondition, "unknown sampling mode '" + s + "'");
}

std::size_t steps_for(double duration, double h) {
  require(h > 0.0, Errc::precondition, "step size h must be positive");
  require(duration >= 0.0, Errc::precondition, "lag must be nonnegative");
  const double ratio = duration / h;
  const double rounded = std::round(ratio);
  require(std::abs(ratio - rounded) <= 1e-12 * std::max(1.0, std::abs(ratio)) ||
              std::abs(duration - rounded * h) <= 1e-12 * std::max(1.0, duration),
          Errc::precondition, "lag " + std::to_string(duration) +
                                  " is not an integer multiple of the step " + std::to_string(h));
  return static_cast<std::size_t>(rounded);
}

namespace {

PairDataset sample_long_trajectory(const SdeModel& model, const SamplingOptions& opts) {
  const std::size_t steps = steps_for(opts.lag, opts.h);
  const auto d = static_cast<Index>(model.dimension);
  Rng rng(opts.seed, stream_tag::trajectory);
  EulerMaruyama em(model, opts.h);

  std::vector<double> x(static_cast<std::size_t>(d));
  opts.init(rng, x);
  double t = opts.t0;
  for (std::size_t i = 0; i < opts.burn_in_steps; ++i) {
    em.step(x, t, rng);
    t += opts.h;
  }

  PairDataset data;
  data.lag = opts.lag;
  data.seed = opts.seed;
  data.mode = SampleMode::long_trajectory;
  data.xs.resize(static_cast<Index>(opts.m), d);
  data.ys.resize(static_cast<Index>(opts.m), d);
  std::vector<double> prev(x.size());
  Index kept = 0;
  for (std::size_t k = 0; k < opts.m; ++k) {
    prev = x;
    for (std::size_t s = 0; s < steps; ++s) {
      em.step(x, t, rng);
      t += opts.h;
    }
    if (model.domain.contains(prev.data()) && model.domain.contains(x.data())) {
      for (Index j = 0; j < d; ++j) {
        data.xs(kept, j) = prev[static_cast<std::size_t>(j)];
        data.ys(kept, j) = x[static_cast<std::size_t>(j)];
      }
      ++kept;
    } else {
      ++data.discarded;
    }
  }
  data.xs.conservativeResize(kept, d);
  data.ys.conservativeResize(kept, d);
  return data;
}

}  // namespace

PairDataset sample_pairs(const SdeModel& model, const SamplingOptions& opts) {
  require(static_cast<bool>(opts.init), Errc::precondition, "sampling needs an initial sampler");
  require(opts.m >= 1, Errc::sampling_failure, "no pairs requested (m = 0)");
  steps_for(opts.lag, opts.h);

  PairDataset data;
  if (opts.mode == SampleMode::long_trajectory) {
    data = sample_long_trajectory(model, opts);
  } else {
    const std::vector<double> times{opts.t0, opts.t0 + opts.lag};
    const BurstSnapshots snaps =
        simulate_bursts(model, opts.init, times, opts.h, opts.m, opts.seed, opts.exec);
    data = pairs_from_snapshots(snaps, 0, 1, model.domain);
    data.lag = opts.lag;
  }
  if (2 * static_cast<std::size_t>(data.size()) < opts.m) {
    fail(Errc::sampling_failure, "only " + std::to_string(data.size()) + " of " +
                                     std::to_string(opts.m) +
                                     " pairs stayed inside the domain");
  }
  return data;
}

BurstSnapshots simulate_bursts(const SdeModel& model, const InitSampler& init,
                               std::span<const double> times, double h, std::size_t m,
                               std::uint64_t seed, Exec exec) {
  require(!times.empty(), Errc::precondition, "at least one snapshot time is required");
  require(static_cast<bool>(init), Errc::precondition, "bursts need an initial sampler");
  std::vector<std::size_t> steps;
  for (std::size_t k = 1; k < times.size(); ++k) {
    require(times[k] >= times[k - 1], Errc::precondition, "snapshot times must be increasing");
    steps.push_back(steps_for(times[k] - times[k - 1], h));
  }
  BurstSnapshots snaps;
  snaps.times.assign(times.begin(), times.end());
  snaps.seed = seed;
  snaps.states.assign(times.size(), Samples(static_cast<Index>(m), model.dimension));
  if (exec == Exec::parallel) {
    kernels::integrate_bursts_omp(model, init, steps, times[0], h, seed, snaps.states);
  } else {
    kernels::integrate_bursts_serial(model, init, steps, times[0], h, seed, snaps.states);
  }
  return snaps;
}

PairDataset pairs_from_snapshots(const BurstSnapshots& snaps, std::size_t from, std::size_t to,
                                 const Box& domain) {
  require(from < snaps.states.size() && to < snaps.states.size(), Errc::precondition,
          "snapshot index out of range");
  const Samples& a = snaps.states[from];
  const Samples& b = snaps.states[to];
  PairDataset data;
  data.lag = snaps.times[to] - snaps.times[from];
  data.seed = snaps.seed;
  data.mode = SampleMode::bursts;
  data.xs.resize(a.rows(), a.cols());
  data.ys.resize(a.rows(), a.cols());
  Index kept = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    if (domain.contains(a.row(i).data()) && domain.contains(b.row(i).data())) {
      data.xs.row(kept) = a.row(i);
      data.ys.row(kept) = b.row(i);
      ++kept;
    } else {
      ++data.discarded;
    }
  }
  data.xs.conservativeResize(kept, a.cols());
  data.ys.conservativeResize(kept, a.cols());
  return data;
}

}  // namespace transop
