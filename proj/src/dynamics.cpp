// Copyright 2026 The rbmsim Authors. - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rbm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "rbm/analysis.hpp"
#include "rbm/parallel.hpp"

namespace rbm {

namespace {

constexpr double kSupportGuard = 1.0 - 1e-12;

struct KernelScratch {
  Vec in, out;
};

// Adds w * K(xi - xj) into acc without temporaries; built-in forms are all a
// scalar profile of |xi - xj|^2 times the difference vector.
inline void accumulate_kernel(const KernelSpec& k, const double* xi,
                              const double* xj, Index d, double w, double* acc,
                              KernelScratch& scratch) {
  switch (k.form) {
    case KernelSpec::Form::Zero:
      return;
    case KernelSpec::Form::ScaledCauchy: {
      double n2 = 0.0;
      for (Index t = 0; t < d; ++t) {
        const double dx = xi[t] - xj[t];
        n2 += dx * dx;
      }
      const double c = w * k.q_i * k.q_j / (1.0 + n2);
      for (Index t = 0; t < d; ++t) acc[t] += c * (xi[t] - xj[t]);
      return;
    }
    case KernelSpec::Form::BumpGradient: {
      double n2 = 0.0;
      for (Index t = 0; t < d; ++t) {
        const double dx = xi[t] - xj[t];
        n2 += dx * dx;
      }
      const double y2 = n2 / (k.eta * k.eta);
      if (y2 >= kSupportGuard * kSupportGuard || k.strength == 0.0) return;
      const double u = 1.0 - y2;
      const double c = w * k.strength * 2.0 / (k.eta * k.eta * k.eta) *
                       std::exp(1.0 - 1.0 / u) / (u * u);
      for (Index t = 0; t < d; ++t) acc[t] += c * (xi[t] - xj[t]);
      return;
    }
    case KernelSpec::Form::Opinion: {
      double n2 = 0.0;
      for (Index t = 0; t < d; ++t) {
        const double dx = xi[t] - xj[t];
        n2 += dx * dx;
      }
      const double y2 = n2 / (k.radius * k.radius);
      const double y10 = y2 * y2 * y2 * y2 * y2;
      if (y10 >= kSupportGuard || k.strength == 0.0) return;
      const double c = -w * k.strength * std::exp(1.0 - 1.0 / (1.0 - y10));
      for (Index t = 0; t < d; ++t) acc[t] += c * (xi[t] - xj[t]);
      return;
    }
    case KernelSpec::Form::Custom: {
      scratch.in.resize(d);
      for (Index t = 0; t < d; ++t) scratch.in[t] = xi[t] - xj[t];
      k.custom(scratch.in, scratch.out);
      for (Index t = 0; t < d; ++t) acc[t] += w * scratch.out[t];
      return;
    }
  }
}

inline void subtract_potential_grad(const PotentialSpec& p, const double* x,
                                    Index d, double* acc,
                                    KernelScratch& scratch) {
  switch (p.form) {
    case PotentialSpec::Form::None:
      return;
    case PotentialSpec::Form::QuadraticWell:
      for (Index t = 0; t < d; ++t) {
        acc[t] -= p.convexity_r * (x[t] - p.well_center[t]);
      }
      return;
    case PotentialSpec::Form::Custom:
      scratch.in.resize(d);
      for (Index t = 0; t < d; ++t) scratch.in[t] = x[t];
      p.custom_grad(scratch.in, scratch.out);
      for (Index t = 0; t < d; ++t) acc[t] -= scratch.out[t];
      return;
  }
}

inline const double* row_ptr(const PosMat& m, Index k) {
  return m.data() + k * m.cols();
}

// Full interaction sum, species ascending, partners ascending.
inline void add_full_interaction(const SystemSpec& spec,
                                 const CoefficientTable& coeffs,
                                 const std::vector<PosMat>& positions, Index i,
                                 Index k, double weight_sign, double* acc,
                                 std::uint64_t& kernel_evals,
                                 KernelScratch& scratch) {
  const Index n = spec.species_count();
  const Index d = spec.dimension;
  const double* xi = row_ptr(positions[i], k);
  for (Index j = 0; j < n; ++j) {
    const KernelSpec& kij = spec.kernels[i][j];
    const double w = weight_sign * coeffs.alpha(i, j);
    const PosMat& xj = positions[j];
    const Index nj = xj.rows();
    for (Index l = 0; l < nj; ++l) {
      if (j == i && l == k) continue;
      accumulate_kernel(kij, xi, row_ptr(xj, l), d, w, acc, scratch);
      ++kernel_evals;
    }
  }
}

// Batch interaction sum over the super-batch of (i,k), species ascending,
// block members in stored (shuffled) order.
inline void add_rbm_interaction(const SystemSpec& spec,
                                const CoefficientTable& coeffs,
                                const std::vector<PosMat>& positions,
                                const Partition& part, Index i, Index k,
                                double weight_sign, double* acc,
                                std::uint64_t& kernel_evals,
                                KernelScratch& scratch) {
  const Index n = spec.species_count();
  const Index d = spec.dimension;
  const double* xi = row_ptr(positions[i], k);
  const std::int32_t r = part.label(i, k);
  for (Index j = 0; j < n; ++j) {
    const KernelSpec& kij = spec.kernels[i][j];
    const double w = weight_sign * coeffs.beta(i, j);
    const PosMat& xj = positions[j];
    for (std::int32_t l : part.block(j, r)) {
      if (j == i && l == k) continue;
      accumulate_kernel(kij, xi, row_ptr(xj, l), d, w, acc, scratch);
      ++kernel_evals;
    }
  }
}

void check_finite_or_throw(const ParticleState& state, int step_index) {
  for (std::size_t i = 0; i < state.positions.size(); ++i) {
    const PosMat& m = state.positions[i];
    if (m.allFinite()) continue;
    for (Index k = 0; k < m.rows(); ++k) {
      if (!m.row(k).allFinite()) {
        std::ostringstream os;
        os << "blow-up: non-finite position for species " << (i + 1)
           << ", particle " << (k + 1) << " at t = " << state.time
           << " (step " << step_index << ")";
        throw BlowUpError(static_cast<int>(i), k, state.time, step_index,
                          os.str());
      }
    }
  }
}

}  // namespace

ParticleState initial_state(const SystemSpec& spec, RngStream& rng) {
  ParticleState state;
  state.time = 0.0;
  const Index d = spec.dimension;
  state.positions.reserve(spec.species.size());
  for (const auto& s : spec.species) {
    PosMat m(s.particle_count, d);
    switch (s.init.kind) {
      case InitialDistribution::Kind::Gaussian: {
        const double sd = std::sqrt(s.init.gaussian.variance);
        const Vec& mean = s.init.gaussian.mean;
        if (mean.size() != d) {
          throw ConfigError("initial mean has wrong dimension");
        }
        for (Index k = 0; k < m.rows(); ++k) {
          for (Index t = 0; t < d; ++t) m(k, t) = mean[t] + sd * rng.normal();
        }
        break;
      }
      case InitialDistribution::Kind::Uniform: {
        const double lo = s.init.uniform.lo, hi = s.init.uniform.hi;
        for (Index k = 0; k < m.rows(); ++k) {
          for (Index t = 0; t < d; ++t) m(k, t) = lo + (hi - lo) * rng.uniform();
        }
        break;
      }
      case InitialDistribution::Kind::PointCloud: {
        // Explicit positions, cycled; consumes no randomness.
        const Mat& pts = s.init.cloud.points;
        if (pts.cols() != d) {
          throw ConfigError("point cloud has wrong dimension");
        }
        for (Index k = 0; k < m.rows(); ++k) {
          m.row(k) = pts.row(k % pts.rows());
        }
        break;
      }
    }
    state.positions.push_back(std::move(m));
  }
  return state;
}

NoiseIncrements sample_noise(RngStream& rng, const SystemSpec& spec,
                             double dt) {
  NoiseIncrements noise;
  const double sd = std::sqrt(dt);
  noise.increments.reserve(spec.species.size());
  for (const auto& s : spec.species) {
    PosMat m(s.particle_count, spec.dimension);
    for (Index k = 0; k < m.rows(); ++k) {
      for (Index t = 0; t < m.cols(); ++t) m(k, t) = sd * rng.normal();
    }
    noise.increments.push_back(std::move(m));
  }
  return noise;
}

void full_drift(const SystemSpec& spec, const CoefficientTable& coeffs,
                const std::vector<PosMat>& positions, Index i, Index k,
                Vec& out, std::uint64_t& kernel_evals) {
  const Index d = spec.dimension;
  out = Vec::Zero(d);
  KernelScratch scratch;
  subtract_potential_grad(spec.species[i].potential, row_ptr(positions[i], k),
                          d, out.data(), scratch);
  add_full_interaction(spec, coeffs, positions, i, k, 1.0, out.data(),
                       kernel_evals, scratch);
  if (!out.allFinite()) {
    throw BlowUpError(static_cast<int>(i), k, 0.0, 0,
                      "blow-up: non-finite full drift");
  }
}

void rbm_drift(const SystemSpec& spec, const CoefficientTable& coeffs,
               const std::vector<PosMat>& positions, const Partition& part,
               Index i, Index k, Vec& out, std::uint64_t& kernel_evals) {
  const Index d = spec.dimension;
  out = Vec::Zero(d);
  KernelScratch scratch;
  subtract_potential_grad(spec.species[i].potential, row_ptr(positions[i], k),
                          d, out.data(), scratch);
  add_rbm_interaction(spec, coeffs, positions, part, i, k, 1.0, out.data(),
                      kernel_evals, scratch);
  if (!out.allFinite()) {
    throw BlowUpError(static_cast<int>(i), k, 0.0, 0,
                      "blow-up: non-finite batch drift");
  }
}

void chi(const SystemSpec& spec, const CoefficientTable& coeffs,
         const std::vector<PosMat>& positions, const Partition& part, Index i,
         Index k, Vec& out, std::uint64_t& kernel_evals) {
  // f and g accumulate separately: for b_i = 1 both sides see identical
  // terms in identical order and the difference is exactly zero.
  Vec batch_force = Vec::Zero(spec.dimension);
  out = Vec::Zero(spec.dimension);
  KernelScratch scratch;
  add_rbm_interaction(spec, coeffs, positions, part, i, k, 1.0,
                      batch_force.data(), kernel_evals, scratch);
  add_full_interaction(spec, coeffs, positions, i, k, 1.0, out.data(),
                       kernel_evals, scratch);
  out = batch_force - out;
}

Vec full_drift(const SystemSpec& spec, const CoefficientTable& coeffs,
               const ParticleState& state, Index i, Index k) {
  Vec out;
  std::uint64_t evals = 0;
  full_drift(spec, coeffs, state.positions, i, k, out, evals);
  return out;
}

Vec rbm_drift(const SystemSpec& spec, const CoefficientTable& coeffs,
              const ParticleState& state, const Partition& part, Index i,
              Index k) {
  Vec out;
  std::uint64_t evals = 0;
  rbm_drift(spec, coeffs, state.positions, part, i, k, out, evals);
  return out;
}

Vec chi(const SystemSpec& spec, const CoefficientTable& coeffs,
        const std::vector<PosMat>& positions, const Partition& part, Index i,
        Index k) {
  Vec out;
  std::uint64_t evals = 0;
  chi(spec, coeffs, positions, part, i, k, out, evals);
  return out;
}

ParticleState em_step(const SystemSpec& spec, const CoefficientTable& coeffs,
                      const ParticleState& state, const Partition* partition,
                      const NoiseIncrements& noise, double dt,
                      std::uint64_t& kernel_evals, int step_index) {
  const Index n = spec.species_count();
  const Index d = spec.dimension;
  ParticleState next;
  next.time = state.time + dt;
  next.positions.resize(n);

  Vec drift(d);
  Vec x(d);
  KernelScratch scratch;
  for (Index i = 0; i < n; ++i) {
    const PosMat& cur = state.positions[i];
    const PosMat& dB = noise.increments[i];
    if (dB.rows() != cur.rows() || dB.cols() != cur.cols()) {
      throw ConfigError("em_step: noise shape does not match the state");
    }
    PosMat& out = next.positions[i];
    out.resize(cur.rows(), d);
    const DiffusionSpec& diff = spec.species[i].diffusion;
    const bool additive = diff.is_additive();
    const double sigma_const = additive ? diff.sigma : 0.0;
    for (Index k = 0; k < cur.rows(); ++k) {
      drift.setZero();
      const double* xi = row_ptr(cur, k);
      subtract_potential_grad(spec.species[i].potential, xi, d, drift.data(),
                              scratch);
      if (partition != nullptr) {
        add_rbm_interaction(spec, coeffs, state.positions, *partition, i, k,
                            1.0, drift.data(), kernel_evals, scratch);
      } else {
        add_full_interaction(spec, coeffs, state.positions, i, k, 1.0,
                             drift.data(), kernel_evals, scratch);
      }
      double sigma = sigma_const;
      if (!additive) {
        for (Index t = 0; t < d; ++t) x[t] = xi[t];
        sigma = eval_diffusion(diff, x);
      }
      for (Index t = 0; t < d; ++t) {
        out(k, t) = xi[t] + dt * drift[t] + sigma * dB(k, t);
      }
    }
  }
  check_finite_or_throw(next, step_index);
  return next;
}

namespace {

Trajectory run_impl(const SystemSpec& spec, std::uint64_t seed,
                    const RunOptions& opts, Method method) {
  throw_if_invalid(spec);
  const CoefficientTable coeffs =
      interaction_coefficients(spec, opts.legacy_beta);
  RngStream rng(seed);

  Trajectory traj;
  traj.seed = seed;
  traj.spec_hash = spec_hash(spec);
  traj.method = method == Method::Full ? "full" : "rbm";

  ParticleState state = initial_state(spec, rng);

  std::vector<double> pending(opts.record_times);
  pending.push_back(spec.end_time);
  std::sort(pending.begin(), pending.end());
  pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
  for (double t : pending) {
    if (t < 0.0 || t > spec.end_time * (1.0 + 1e-12)) {
      throw ConfigError("record time outside [0, T]");
    }
  }

  traj.times.push_back(0.0);
  traj.states.push_back(state);
  std::size_t next_record = 0;
  while (next_record < pending.size() && pending[next_record] <= 1e-12) {
    ++next_record;
  }

  const int steps = spec.steps();
  for (int m = 1; m <= steps; ++m) {
    const double dt = std::min(spec.tau, spec.end_time - state.time);
    if (dt <= 0.0) break;
    if (method == Method::Rbm) {
      const Partition part = sample_partition(spec, rng);
      const NoiseIncrements noise = sample_noise(rng, spec, dt);
      state = em_step(spec, coeffs, state, &part, noise, dt,
                      traj.kernel_evals, m);
    } else {
      const NoiseIncrements noise = sample_noise(rng, spec, dt);
      state = em_step(spec, coeffs, state, nullptr, noise, dt,
                      traj.kernel_evals, m);
    }
    bool record = false;
    while (next_record < pending.size() &&
           state.time >= pending[next_record] - 1e-12) {
      ++next_record;
      record = true;
    }
    if (record) {
      traj.times.push_back(state.time);
      traj.states.push_back(state);
    }
  }
  return traj;
}

}  // namespace

Trajectory run_rbm(const SystemSpec& spec, std::uint64_t seed,
                   const RunOptions& opts) {
  return run_impl(spec, seed, opts, Method::Rbm);
}

Trajectory run_full(const SystemSpec& spec, std::uint64_t seed,
                    const RunOptions& opts) {
  return run_impl(spec, seed, opts, Method::Full);
}

ErrorSeries run_coupled(const SystemSpec& spec0, const CoupledOptions& opts) {
  if (opts.tau_list.empty()) {
    throw ConfigError("run_coupled: tau list is empty");
  }
  if (opts.ref_refinement < 0) {
    throw ConfigError("run_coupled: reference refinement must be >= 0");
  }
  if (opts.replicas < 1) {
    throw ConfigError("run_coupled: need at least one replica");
  }
  std::vector<double> taus(opts.tau_list);
  std::sort(taus.begin(), taus.end(), std::greater<>());
  for (double tau : taus) {
    if (tau <= 0.0) throw ConfigError("run_coupled: tau must be positive");
    const double q = spec0.end_time / tau;
    if (std::abs(q - std::nearbyint(q)) > 1e-9 * std::max(1.0, q)) {
      throw ConfigError(
          "run_coupled: end time is not an integer multiple of tau = " +
          std::to_string(tau));
    }
  }

  const int fine_per_coarse = 1 << opts.ref_refinement;
  Mat errors(static_cast<Index>(taus.size()), opts.replicas);

  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    SystemSpec spec = spec0;
    spec.tau = taus[ti];
    throw_if_invalid(spec);
    const CoefficientTable coeffs =
        interaction_coefficients(spec, opts.legacy_beta);
    const int steps = spec.steps();
    const std::uint64_t tau_seed = derive_stream_seed(opts.seed, ti);

    parallel_for_index(opts.replicas, opts.workers, [&](int r) {
      RngStream rng(derive_stream_seed(tau_seed, static_cast<std::uint64_t>(r)));
      std::uint64_t evals = 0;
      ParticleState ref = initial_state(spec, rng);
      ParticleState rbm = ref;  // synchronous coupling: shared initial samples
      NoiseIncrements coarse;
      for (int m = 1; m <= steps; ++m) {
        const double dt = std::min(spec.tau, spec.end_time - rbm.time);
        const Partition part = sample_partition(spec, rng);
        bool first = true;
        for (int f = 0; f < fine_per_coarse; ++f) {
          NoiseIncrements fine = sample_noise(rng, spec, dt / fine_per_coarse);
          ref = em_step(spec, coeffs, ref, nullptr, fine, dt / fine_per_coarse,
                        evals, m);
          if (first) {
            coarse = std::move(fine);
            first = false;
          } else {
            for (std::size_t i = 0; i < coarse.increments.size(); ++i) {
              coarse.increments[i] += fine.increments[i];
            }
          }
        }
        rbm = em_step(spec, coeffs, rbm, &part, coarse, dt, evals, m);
      }
      errors(static_cast<Index>(ti), r) = discrete_l2_error(rbm, ref);
    });
  }

  ErrorSeries series;
  series.taus = taus;
  series.replicas = opts.replicas;
  series.seed = opts.seed;
  series.mean_errors.resize(taus.size());
  series.std_errors.resize(taus.size());
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    const auto row = errors.row(static_cast<Index>(ti));
    const double mean = row.mean();
    series.mean_errors[ti] = mean;
    double var = 0.0;
    for (int r = 0; r < opts.replicas; ++r) {
      var += (row(r) - mean) * (row(r) - mean);
    }
    series.std_errors[ti] =
        opts.replicas > 1
            ? std::sqrt(var / (opts.replicas - 1.0) / opts.replicas)
            : 0.0;
  }

  std::vector<std::pair<double, double>> pts;
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    pts.emplace_back(taus[ti], series.mean_errors[ti]);
  }
  const SlopeFit fit = convergence_slope(pts);
  series.slope = fit.slope;
  series.intercept = fit.intercept;
  series.residual = fit.residual;
  series.slope_valid = fit.valid;
  return series;
}

std::uint64_t spec_hash(const SystemSpec& spec) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  auto mix_double = [&](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    mix(bits);
  };
  mix(static_cast<std::uint64_t>(spec.dimension));
  mix(static_cast<std::uint64_t>(spec.species.size()));
  mix_double(spec.end_time);
  mix_double(spec.tau);
  for (const auto& s : spec.species) {
    mix(static_cast<std::uint64_t>(s.particle_count));
    mix(static_cast<std::uint64_t>(s.batch_size));
    mix(static_cast<std::uint64_t>(s.potential.form));
    mix(static_cast<std::uint64_t>(s.diffusion.form));
  }
  for (const auto& row : spec.kernels) {
    for (const auto& k : row) {
      mix(static_cast<std::uint64_t>(k.form));
      mix_double(k.strength);
      mix_double(k.q_i * k.q_j);
    }
  }
  return h;
}

}  // namespace rbm
