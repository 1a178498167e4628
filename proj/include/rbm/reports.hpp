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

#ifndef RBMSIM_REPORTS_HPP
#define RBMSIM_REPORTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rbm/common.hpp"

namespace rbm {

// Constants of the error estimate: Gamma_i variance prefactors,
// theta = max_j b_j / min_j b_j, gamma = 3(max{1, q_1..q_n} + 1), and the
// remainder-variance bound 8 max ||K||_inf^2 sum_k Gamma_k.
struct TheoryConstants {
  Vec gamma_factors;      // Gamma_i per species
  double theta = 1.0;
  double gamma_exponent = 6.0;
  double variance_bound = 0.0;
  bool variance_bound_known = true;  // false if some sup norm is undeclared
};

// Moments of the remainder chi at fixed positions, from three routes:
// the closed form, exhaustive enumeration over partitions, and Monte Carlo.
struct ChiVariance {
  double variance = 0.0;  // E|chi|^2
  Mat a_cross;            // A_i^{jj'}, zero on rows/cols touching i or j==j'
  Vec a_pair;             // A_i^j
  Vec a_diag;             // A_{i,1}^j
  double a_same = 0.0;    // A_i
};

struct ExactChiMoments {
  Vec mean;
  double variance = 0.0;  // mean of |chi|^2 over all partitions
  std::uint64_t partition_count = 0;
};

struct EmpiricalChiMoments {
  Vec mean;
  double variance = 0.0;      // unbiased sample variance of chi (scalar |.|^2)
  double mean_se = 0.0;       // standard error of |mean|
  double variance_se = 0.0;   // standard error of the variance estimate
  std::int64_t samples = 0;
};

struct ConsistencyEntry {
  int species = 0;    // 1-based in reports
  Index particle = 0;
  double closed_form_variance = 0.0;
  ChiVariance closed_form;
  ExactChiMoments exact;
  EmpiricalChiMoments monte_carlo;
  bool has_exact = false;
  bool has_monte_carlo = false;
};

struct ConsistencyReport {
  std::vector<ConsistencyEntry> entries;
  TheoryConstants constants;
  double max_mean_norm = 0.0;        // max |exact mean| over entries
  double max_variance_discrepancy = 0.0;  // max rel. |closed - exact|
  bool consistent = false;
  std::string mode;  // "enumeration" or "monte-carlo"
};

struct ErrorSeries {
  std::vector<double> taus;        // strictly decreasing
  std::vector<double> mean_errors;
  std::vector<double> std_errors;  // standard error over replicas
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  bool slope_valid = false;
  int replicas = 0;
  std::uint64_t seed = 0;
};

struct CostReport {
  std::uint64_t full_kernel_evals_per_step = 0;
  std::uint64_t rbm_kernel_evals_per_step = 0;
  double full_arith_ops_per_step = 0.0;  // documented per-form weights
  double rbm_arith_ops_per_step = 0.0;
  int steps = 0;
  std::uint64_t full_kernel_evals_total = 0;
  std::uint64_t rbm_kernel_evals_total = 0;
  double eval_ratio = 0.0;  // rbm / full, per step
};

struct Histogram {
  double lo = 0.0, hi = 0.0;
  std::vector<double> density;   // integrates to 1 minus out-of-range mass
  double below_fraction = 0.0;
  double above_fraction = 0.0;
  Index total_count = 0;
  double bin_width() const {
    return density.empty() ? 0.0 : (hi - lo) / static_cast<double>(density.size());
  }
};

}  // namespace rbm

#endif  // RBMSIM_REPORTS_HPP
