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

#ifndef RBMSIM_DYNAMICS_HPP
#define RBMSIM_DYNAMICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rbm/batching.hpp"
#include "rbm/common.hpp"
#include "rbm/model.hpp"
#include "rbm/reports.hpp"
#include "rbm/rng.hpp"

namespace rbm {

// Positions stored row-per-particle; row-major so one particle's coordinates
// are contiguous in the pairwise loops.
using PosMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ParticleState {
  std::vector<PosMat> positions;  // per species, N_i x d
  double time = 0.0;
};

struct NoiseIncrements {
  std::vector<PosMat> increments;  // per species, N_i x d, entries N(0, dt)
};

struct Trajectory {
  std::vector<double> times;          // strictly increasing, first is 0
  std::vector<ParticleState> states;  // one per recorded time
  std::uint64_t seed = 0;
  std::uint64_t spec_hash = 0;
  std::string method;  // "full" or "rbm"
  std::uint64_t kernel_evals = 0;
};

enum class Method { Full, Rbm };

/// i.i.d. samples from each species' initial distribution. Draw order:
/// species ascending, particle ascending, coordinate ascending.
ParticleState initial_state(const SystemSpec& spec, RngStream& rng);

/// N_i x d Gaussian increments with variance dt, Box-Muller transformed,
/// filled in the same order as initial_state. Deterministic per stream state.
NoiseIncrements sample_noise(RngStream& rng, const SystemSpec& spec,
                             double dt);

/// -grad V_i(X_i^k) + sum_j alpha_ij sum_{(j,l) != (i,k)} K_ij(X_i^k - X_j^l).
/// Every kernel evaluation increments kernel_evals.
void full_drift(const SystemSpec& spec, const CoefficientTable& coeffs,
                const std::vector<PosMat>& positions, Index i, Index k,
                Vec& out, std::uint64_t& kernel_evals);

/// -grad V_i + sum_j beta_ij sum over the super-batch of (i,k); species with
/// fewer batches contribute nothing when the label exceeds their b_j.
void rbm_drift(const SystemSpec& spec, const CoefficientTable& coeffs,
               const std::vector<PosMat>& positions, const Partition& part,
               Index i, Index k, Vec& out, std::uint64_t& kernel_evals);

/// Interaction-only remainder f_i^k - g_i^k; equals rbm_drift - full_drift
/// since the potential cancels.
void chi(const SystemSpec& spec, const CoefficientTable& coeffs,
         const std::vector<PosMat>& positions, const Partition& part, Index i,
         Index k, Vec& out, std::uint64_t& kernel_evals);

Vec full_drift(const SystemSpec& spec, const CoefficientTable& coeffs,
               const ParticleState& state, Index i, Index k);
Vec rbm_drift(const SystemSpec& spec, const CoefficientTable& coeffs,
              const ParticleState& state, const Partition& part, Index i,
              Index k);
Vec chi(const SystemSpec& spec, const CoefficientTable& coeffs,
        const std::vector<PosMat>& positions, const Partition& part, Index i,
        Index k);

/// One explicit Euler-Maruyama step over dt: X + drift dt + sigma dB, the
/// multiplicative sigma evaluated at the pre-step position. partition ==
/// nullptr selects the full drift. Non-finite results abort with BlowUpError.
ParticleState em_step(const SystemSpec& spec, const CoefficientTable& coeffs,
                      const ParticleState& state, const Partition* partition,
                      const NoiseIncrements& noise, double dt,
                      std::uint64_t& kernel_evals, int step_index = 0);

struct RunOptions {
  std::vector<double> record_times;  // always augmented with 0 and T
  bool legacy_beta = false;          // negative-control coefficient table
};

/// Random-batch run: a fresh partition at every step, one Euler-Maruyama
/// step per batching interval. Stream usage per step: partition first, then
/// noise.
Trajectory run_rbm(const SystemSpec& spec, std::uint64_t seed,
                   const RunOptions& opts = {});

/// Full pairwise dynamics with the same stream discipline (no partition
/// draws), so a run with p_i = N_i for every i is bit-identical to run_rbm.
Trajectory run_full(const SystemSpec& spec, std::uint64_t seed,
                    const RunOptions& opts = {});

struct CoupledOptions {
  std::vector<double> tau_list;  // strictly decreasing
  int ref_refinement = 2;        // s: reference step is tau / 2^s
  int replicas = 10;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = resolve from RBM_WORKERS / hardware
  bool legacy_beta = false;
};

/// Synchronously coupled strong-error measurement. Per replica and per tau:
/// one Brownian path at resolution tau/2^s drives a full-dynamics reference,
/// and its per-coarse-step aggregated increments drive the random-batch run
/// from the same initial samples. Returns the discrete L2(Omega) error at T
/// per tau, averaged over replicas, with the log-log slope fitted.
ErrorSeries run_coupled(const SystemSpec& spec, const CoupledOptions& opts);

/// Structural digest of a system (species sizes, batch sizes, dimension,
/// time grid) for trajectory metadata.
std::uint64_t spec_hash(const SystemSpec& spec);

}  // namespace rbm

#endif  // RBMSIM_DYNAMICS_HPP
