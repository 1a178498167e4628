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

#ifndef RBMSIM_ANALYSIS_HPP
#define RBMSIM_ANALYSIS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "rbm/batching.hpp"
#include "rbm/common.hpp"
#include "rbm/dynamics.hpp"
#include "rbm/model.hpp"
#include "rbm/reports.hpp"
#include "rbm/rng.hpp"

namespace rbm {

/// Per-species variance prefactors Gamma_i:
///   sum_{j,j' != i, j != j'} (max{b_i,b_j,b_j'}/max{b_j,b_j'} - 1)
/// + sum_{j != i} [ (b_i - min{b_i,b_j})/min{b_i,b_j}
///                  - (2 - max{b_i,b_j})/N_j + b_i/(p_j min{b_i,b_j}) ]
/// + 1/(p_i - 1) - 1/(N_i - 1).
Vec gamma_factors(const SystemSpec& spec);

/// theta = max_j b_j / min_j b_j.
double theta(const SystemSpec& spec);

/// gamma = 3 (max{1, q_1, ..., q_n} + 1), q_i from the potentials.
double gamma_exponent(const SystemSpec& spec);

/// Gamma_i, theta, gamma and the remainder-variance bound
/// 8 max_{ij} ||K_ij||_inf^2 sum_k Gamma_k (flagged unknown if some custom
/// kernel lacks a declared sup norm).
TheoryConstants theory_constants(const SystemSpec& spec);

/// Closed-form Var(chi_i^k) = E|chi_i^k|^2 at fixed positions, with the
/// A-term breakdown. Kernel products are Euclidean dot products. The A_i^j
/// and A_i^{jj'} coefficients follow the case-by-case inclusion
/// probabilities, which the enumeration oracle confirms exactly:
///   A_i^{jj'}: max{b_i,b_j,b_j'}/max{b_j,b_j'} - 1
///   A_i^j    : b_i (p_j - 1)/(p_j min{b_i,b_j}) - (N_j - 1)/N_j
///   A_{i,1}^j: (max{b_i,b_j} - 1)/N_j
///   A_i      : 1/(p_i - 1) - 1/(N_i - 1)
ChiVariance closed_form_chi_variance(const std::vector<PosMat>& positions,
                                     const SystemSpec& spec, Index i, Index k);

/// Brute-force moments of chi averaged over every joint partition.
ExactChiMoments exact_chi_moments(const std::vector<PosMat>& positions,
                                  const SystemSpec& spec, Index i, Index k,
                                  std::uint64_t cap = 1000000,
                                  bool legacy_beta = false);

/// Monte-Carlo moments over freshly sampled partitions (samples >= 2).
EmpiricalChiMoments empirical_chi_moments(const std::vector<PosMat>& positions,
                                          const SystemSpec& spec, Index i,
                                          Index k, std::int64_t samples,
                                          RngStream& rng);

/// E = ( sum_i (1/N_i) sum_k |X_i^k - Y_i^k|^2 )^{1/2}; pairing is by index.
double discrete_l2_error(const ParticleState& a, const ParticleState& b);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS residual of the fit
  bool valid = false;
  int excluded_zero_points = 0;
};

/// Ordinary least squares of ln E against ln tau. Points with E = 0 are
/// excluded with a warning count; needs >= 3 usable points.
SlopeFit convergence_slope(const std::vector<std::pair<double, double>>& pts);

/// Exact kernel-evaluation counts per step:
///   full: sum_i N_i (N - 1)
///   rbm:  sum_i [ N_i (p_i - 1) + sum_{j != i} p_i p_j min{b_i, b_j} ]
/// (the rbm count is partition-independent; the partition argument feeds the
/// runtime cross-check paths). Arithmetic-op estimates use documented
/// per-form weights.
CostReport kernel_eval_counts(const SystemSpec& spec, const Partition& part);

/// Documented arithmetic weight of one evaluation of this kernel form.
double kernel_arith_weight(const KernelSpec& kernel, Index dimension);

/// Fixed-bin density over [lo, hi) for one species (d = 1): integrates to
/// (1 - out-of-range mass); out-of-range fractions reported separately.
Histogram histogram(const ParticleState& state, Index species, int bin_count,
                    double lo, double hi);
Histogram histogram(const std::vector<double>& samples, int bin_count,
                    double lo, double hi);

/// Overlap coefficient: integral of min of the two densities (same binning).
double overlap_coefficient(const Histogram& a, const Histogram& b);

/// Mean squared radius (1/N) sum |X|^2 over every particle of every species.
double mean_square_radius(const ParticleState& state);

/// Consistency verification across the three routes on one configuration.
/// Enumeration mode demands |E chi| <= abs_tol and closed-vs-exact variance
/// within rel_tol; Monte-Carlo mode checks agreement within 4 standard
/// errors.
ConsistencyReport consistency_report(const SystemSpec& spec,
                                     const std::vector<PosMat>& positions,
                                     bool monte_carlo, std::int64_t mc_samples,
                                     std::uint64_t enumeration_cap,
                                     std::uint64_t seed,
                                     bool legacy_beta = false,
                                     double abs_tol = 1e-12,
                                     double rel_tol = 1e-12);

}  // namespace rbm

#endif  // RBMSIM_ANALYSIS_HPP
