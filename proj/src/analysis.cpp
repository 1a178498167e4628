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

#include "rbm/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace rbm {

Vec gamma_factors(const SystemSpec& spec) {
  const Index n = spec.species_count();
  Vec gamma(n);
  for (Index i = 0; i < n; ++i) {
    const double bi = static_cast<double>(spec.species[i].batch_count());
    double g = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double bj = static_cast<double>(spec.species[j].batch_count());
      for (Index jp = 0; jp < n; ++jp) {
        if (jp == i || jp == j) continue;
        const double bjp = static_cast<double>(spec.species[jp].batch_count());
        g += std::max({bi, bj, bjp}) / std::max(bj, bjp) - 1.0;
      }
      const double nj = static_cast<double>(spec.species[j].particle_count);
      const double pj = static_cast<double>(spec.species[j].batch_size);
      const double mn = std::min(bi, bj);
      g += (bi - mn) / mn - (2.0 - std::max(bi, bj)) / nj + bi / (pj * mn);
    }
    const double ni = static_cast<double>(spec.species[i].particle_count);
    const double pi = static_cast<double>(spec.species[i].batch_size);
    g += 1.0 / (pi - 1.0) - 1.0 / (ni - 1.0);
    gamma[i] = g;
  }
  return gamma;
}

double theta(const SystemSpec& spec) {
  double lo = 0.0, hi = 0.0;
  for (Index i = 0; i < spec.species_count(); ++i) {
    const double b = static_cast<double>(spec.species[i].batch_count());
    lo = (i == 0) ? b : std::min(lo, b);
    hi = (i == 0) ? b : std::max(hi, b);
  }
  return hi / lo;
}

double gamma_exponent(const SystemSpec& spec) {
  double q = 1.0;
  for (const auto& s : spec.species) q = std::max(q, s.potential.growth_q);
  return 3.0 * (q + 1.0);
}

TheoryConstants theory_constants(const SystemSpec& spec) {
  TheoryConstants c;
  c.gamma_factors = gamma_factors(spec);
  c.theta = theta(spec);
  c.gamma_exponent = gamma_exponent(spec);
  double max_sup = 0.0;
  c.variance_bound_known = true;
  for (const auto& row : spec.kernels) {
    for (const auto& k : row) {
      if (!k.sup_norm) {
        c.variance_bound_known = false;
      } else {
        max_sup = std::max(max_sup, *k.sup_norm);
      }
    }
  }
  c.variance_bound = 8.0 * max_sup * max_sup * c.gamma_factors.sum();
  return c;
}

ChiVariance closed_form_chi_variance(const std::vector<PosMat>& positions,
                                     const SystemSpec& spec, Index i,
                                     Index k) {
  const Index n = spec.species_count();
  const Index d = spec.dimension;
  ChiVariance out;
  out.a_cross = Mat::Zero(n, n);
  out.a_pair = Vec::Zero(n);
  out.a_diag = Vec::Zero(n);

  const Vec xi = positions[i].row(k).transpose();

  // Per species: S_j = sum_l K_ij(x_i^k - x_j^l) and Q_j = sum_l |K_ij|^2.
  Mat sums(n, d);
  Vec squares(n);
  Vec kv;
  for (Index j = 0; j < n; ++j) {
    Vec s = Vec::Zero(d);
    double q = 0.0;
    for (Index l = 0; l < positions[j].rows(); ++l) {
      eval_kernel(spec, i, j, xi - positions[j].row(l).transpose(), kv);
      s += kv;
      q += kv.squaredNorm();
    }
    sums.row(j) = s.transpose();
    squares[j] = q;
  }

  const double bi = static_cast<double>(spec.species[i].batch_count());
  const double ni = static_cast<double>(spec.species[i].particle_count);
  const double pi = static_cast<double>(spec.species[i].batch_size);
  double var = 0.0;

  for (Index j = 0; j < n; ++j) {
    if (j == i) continue;
    const double nj = static_cast<double>(spec.species[j].particle_count);
    const double pj = static_cast<double>(spec.species[j].batch_size);
    const double bj = static_cast<double>(spec.species[j].batch_count());
    for (Index jp = 0; jp < n; ++jp) {
      if (jp == i || jp == j) continue;
      const double njp = static_cast<double>(spec.species[jp].particle_count);
      const double bjp = static_cast<double>(spec.species[jp].batch_count());
      const double a = sums.row(j).dot(sums.row(jp)) / (nj * njp);
      out.a_cross(j, jp) = a;
      var += (std::max({bi, bj, bjp}) / std::max(bj, bjp) - 1.0) * a;
    }
    const double pair_sum = sums.row(j).squaredNorm() - squares[j];
    const double a_pair = pair_sum / (nj * (nj - 1.0));
    const double a_diag = squares[j] / nj;
    out.a_pair[j] = a_pair;
    out.a_diag[j] = a_diag;
    const double mn = std::min(bi, bj);
    var += (bi * (pj - 1.0) / (pj * mn) - (nj - 1.0) / nj) * a_pair;
    var += (std::max(bi, bj) - 1.0) / nj * a_diag;
  }

  // Same-species spread term A_i; empty for N_i = 2 (b_i = 1, no remainder).
  if (spec.species[i].particle_count > 2) {
    Vec mean = Vec::Zero(d);
    std::vector<Vec> same;
    same.reserve(positions[i].rows());
    for (Index l = 0; l < positions[i].rows(); ++l) {
      if (l == k) continue;
      eval_kernel(spec, i, i, xi - positions[i].row(l).transpose(), kv);
      same.push_back(kv);
      mean += kv;
    }
    mean /= ni - 1.0;
    double a_same = 0.0;
    for (const Vec& v : same) a_same += (v - mean).squaredNorm();
    a_same /= ni - 2.0;
    out.a_same = a_same;
    var += (1.0 / (pi - 1.0) - 1.0 / (ni - 1.0)) * a_same;
  }

  out.variance = var;
  return out;
}

ExactChiMoments exact_chi_moments(const std::vector<PosMat>& positions,
                                  const SystemSpec& spec, Index i, Index k,
                                  std::uint64_t cap, bool legacy_beta) {
  const CoefficientTable coeffs = interaction_coefficients(spec, legacy_beta);
  ExactChiMoments m;
  m.mean = Vec::Zero(spec.dimension);
  Vec c;
  std::uint64_t evals = 0;
  enumerate_partitions(
      spec,
      [&](const Partition& part) {
        chi(spec, coeffs, positions, part, i, k, c, evals);
        m.mean += c;
        m.variance += c.squaredNorm();
        ++m.partition_count;
      },
      cap);
  m.mean /= static_cast<double>(m.partition_count);
  m.variance /= static_cast<double>(m.partition_count);
  return m;
}

EmpiricalChiMoments empirical_chi_moments(const std::vector<PosMat>& positions,
                                          const SystemSpec& spec, Index i,
                                          Index k, std::int64_t samples,
                                          RngStream& rng) {
  if (samples < 2) {
    throw ConfigError("empirical_chi_moments: need at least 2 samples");
  }
  const CoefficientTable coeffs = interaction_coefficients(spec);
  const Index d = spec.dimension;
  Vec mean = Vec::Zero(d);
  double m2 = 0.0;   // sum |chi|^2
  double m4 = 0.0;   // sum |chi|^4
  Vec c;
  std::uint64_t evals = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const Partition part = sample_partition(spec, rng);
    chi(spec, coeffs, positions, part, i, k, c, evals);
    mean += c;
    const double n2 = c.squaredNorm();
    m2 += n2;
    m4 += n2 * n2;
  }
  EmpiricalChiMoments out;
  out.samples = samples;
  out.mean = mean / static_cast<double>(samples);
  const double s = static_cast<double>(samples);
  // E chi = 0, so |chi|^2 is the variance observable; unbiased correction
  // against the sample mean in each coordinate.
  out.variance = (m2 - s * out.mean.squaredNorm()) / (s - 1.0);
  const double second = m2 / s;
  const double fourth = m4 / s;
  out.variance_se =
      std::sqrt(std::max(0.0, fourth - second * second) / s);
  out.mean_se = std::sqrt(std::max(0.0, second) / s);
  return out;
}

double discrete_l2_error(const ParticleState& a, const ParticleState& b) {
  if (a.positions.size() != b.positions.size()) {
    throw ConfigError("discrete_l2_error: species count mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.positions.size(); ++i) {
    const PosMat& xa = a.positions[i];
    const PosMat& xb = b.positions[i];
    if (xa.rows() != xb.rows() || xa.cols() != xb.cols()) {
      throw ConfigError("discrete_l2_error: state shape mismatch");
    }
    total += (xa - xb).squaredNorm() / static_cast<double>(xa.rows());
  }
  return std::sqrt(total);
}

SlopeFit convergence_slope(
    const std::vector<std::pair<double, double>>& pts) {
  SlopeFit fit;
  std::vector<std::pair<double, double>> usable;
  for (const auto& [tau, err] : pts) {
    if (tau <= 0.0) throw ConfigError("convergence_slope: tau must be > 0");
    if (err < 0.0) throw ConfigError("convergence_slope: negative error");
    if (err == 0.0) {
      ++fit.excluded_zero_points;
      continue;
    }
    usable.emplace_back(std::log(tau), std::log(err));
  }
  if (usable.size() < 3) {
    fit.valid = false;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : usable) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(usable.size());
  const double denom = m * sxx - sx * sx;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss = 0.0;
  for (const auto& [x, y] : usable) {
    const double r = y - (fit.slope * x + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  fit.valid = true;
  return fit;
}

double kernel_arith_weight(const KernelSpec& kernel, Index dimension) {
  const double d = static_cast<double>(dimension);
  switch (kernel.form) {
    case KernelSpec::Form::Zero:
      return 0.0;
    case KernelSpec::Form::ScaledCauchy:
      return 3.0 * d + 3.0;  // diff, |.|^2, scale, axpy
    case KernelSpec::Form::BumpGradient:
      return 3.0 * d + 12.0;  // adds the support test and exp
    case KernelSpec::Form::Opinion:
      return 3.0 * d + 14.0;  // tenth power and exp
    case KernelSpec::Form::Custom:
      return 3.0 * d + 10.0;  // nominal
  }
  return 0.0;
}

CostReport kernel_eval_counts(const SystemSpec& spec, const Partition& part) {
  const Index n = spec.species_count();
  CostReport rep;
  const auto N = static_cast<std::uint64_t>(spec.total_particles());

  double full_ops = 0.0, rbm_ops = 0.0;
  for (Index i = 0; i < n; ++i) {
    const auto ni = static_cast<std::uint64_t>(spec.species[i].particle_count);
    const auto pi = static_cast<std::uint64_t>(spec.species[i].batch_size);
    const auto bi = static_cast<std::uint64_t>(spec.species[i].batch_count());
    rep.full_kernel_evals_per_step += ni * (N - 1);
    rep.rbm_kernel_evals_per_step += ni * (pi - 1);
    full_ops += static_cast<double>(ni * (ni - 1)) *
                kernel_arith_weight(spec.kernels[i][i], spec.dimension);
    rbm_ops += static_cast<double>(ni * (pi - 1)) *
               kernel_arith_weight(spec.kernels[i][i], spec.dimension);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto nj = static_cast<std::uint64_t>(spec.species[j].particle_count);
      const auto pj = static_cast<std::uint64_t>(spec.species[j].batch_size);
      const auto bj = static_cast<std::uint64_t>(spec.species[j].batch_count());
      const std::uint64_t cross = pi * pj * std::min(bi, bj);
      rep.rbm_kernel_evals_per_step += cross;
      const double w = kernel_arith_weight(spec.kernels[i][j], spec.dimension);
      full_ops += static_cast<double>(ni * nj) * w;
      rbm_ops += static_cast<double>(cross) * w;
    }
  }
  (void)part;  // counts are partition-independent; kept for the cross-check API

  rep.full_arith_ops_per_step = full_ops;
  rep.rbm_arith_ops_per_step = rbm_ops;
  rep.steps = spec.steps();
  rep.full_kernel_evals_total =
      rep.full_kernel_evals_per_step * static_cast<std::uint64_t>(rep.steps);
  rep.rbm_kernel_evals_total =
      rep.rbm_kernel_evals_per_step * static_cast<std::uint64_t>(rep.steps);
  rep.eval_ratio = static_cast<double>(rep.rbm_kernel_evals_per_step) /
                   static_cast<double>(rep.full_kernel_evals_per_step);
  return rep;
}

Histogram histogram(const std::vector<double>& samples, int bin_count,
                    double lo, double hi) {
  if (bin_count < 1) throw ConfigError("histogram: bin_count must be >= 1");
  if (!(lo < hi)) throw ConfigError("histogram: empty range");
  if (samples.empty()) throw ConfigError("histogram: no samples");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.density.assign(bin_count, 0.0);
  h.total_count = static_cast<Index>(samples.size());
  std::int64_t below = 0, above = 0;
  const double width = (hi - lo) / bin_count;
  for (double x : samples) {
    if (x < lo) {
      ++below;
    } else if (x >= hi) {
      ++above;
    } else {
      const int b = std::min(bin_count - 1,
                             static_cast<int>((x - lo) / width));
      h.density[b] += 1.0;
    }
  }
  const double norm = static_cast<double>(samples.size()) * width;
  for (double& v : h.density) v /= norm;
  h.below_fraction = static_cast<double>(below) / samples.size();
  h.above_fraction = static_cast<double>(above) / samples.size();
  return h;
}

Histogram histogram(const ParticleState& state, Index species, int bin_count,
                    double lo, double hi) {
  if (species < 0 || species >= static_cast<Index>(state.positions.size())) {
    throw ConfigError("histogram: species index out of range");
  }
  const PosMat& m = state.positions[species];
  if (m.cols() != 1) {
    throw ConfigError("histogram: density output requires d = 1");
  }
  if (m.rows() == 0) throw ConfigError("histogram: empty species");
  std::vector<double> samples(m.data(), m.data() + m.rows());
  return histogram(samples, bin_count, lo, hi);
}

double overlap_coefficient(const Histogram& a, const Histogram& b) {
  if (a.density.size() != b.density.size() || a.lo != b.lo || a.hi != b.hi) {
    throw ConfigError("overlap_coefficient: histograms use different bins");
  }
  double o = 0.0;
  for (std::size_t t = 0; t < a.density.size(); ++t) {
    o += std::min(a.density[t], b.density[t]);
  }
  return o * a.bin_width();
}

double mean_square_radius(const ParticleState& state) {
  double total = 0.0;
  Index count = 0;
  for (const auto& m : state.positions) {
    total += m.squaredNorm();
    count += m.rows();
  }
  return total / static_cast<double>(count);
}

ConsistencyReport consistency_report(const SystemSpec& spec,
                                     const std::vector<PosMat>& positions,
                                     bool monte_carlo, std::int64_t mc_samples,
                                     std::uint64_t enumeration_cap,
                                     std::uint64_t seed, bool legacy_beta,
                                     double abs_tol, double rel_tol) {
  ConsistencyReport rep;
  rep.constants = theory_constants(spec);
  rep.mode = monte_carlo ? "monte-carlo" : "enumeration";
  rep.consistent = true;
  RngStream rng(seed);

  // One probe particle per species plus a second one for the first species,
  // covering both k = 0 and an interior index.
  std::vector<std::pair<Index, Index>> probes;
  for (Index i = 0; i < spec.species_count(); ++i) {
    probes.emplace_back(i, 0);
    if (i == 0 && spec.species[i].particle_count > 1) {
      probes.emplace_back(i, spec.species[i].particle_count - 1);
    }
  }

  for (auto [i, k] : probes) {
    ConsistencyEntry e;
    e.species = static_cast<int>(i) + 1;
    e.particle = k;
    e.closed_form = closed_form_chi_variance(positions, spec, i, k);
    e.closed_form_variance = e.closed_form.variance;
    if (monte_carlo) {
      e.monte_carlo =
          empirical_chi_moments(positions, spec, i, k, mc_samples, rng);
      e.has_monte_carlo = true;
      const double mean_gap = e.monte_carlo.mean.norm();
      const double var_gap =
          std::abs(e.monte_carlo.variance - e.closed_form_variance);
      rep.max_mean_norm = std::max(rep.max_mean_norm, mean_gap);
      rep.max_variance_discrepancy = std::max(
          rep.max_variance_discrepancy,
          var_gap / (1.0 + std::abs(e.closed_form_variance)));
      if (mean_gap > 4.0 * e.monte_carlo.mean_se + abs_tol ||
          var_gap > 4.0 * e.monte_carlo.variance_se + abs_tol) {
        rep.consistent = false;
      }
    } else {
      e.exact = exact_chi_moments(positions, spec, i, k, enumeration_cap,
                                  legacy_beta);
      e.has_exact = true;
      const double mean_gap = e.exact.mean.norm();
      const double var_gap =
          std::abs(e.exact.variance - e.closed_form_variance) /
          (1.0 + std::abs(e.exact.variance));
      rep.max_mean_norm = std::max(rep.max_mean_norm, mean_gap);
      rep.max_variance_discrepancy =
          std::max(rep.max_variance_discrepancy, var_gap);
      if (mean_gap > abs_tol || var_gap > rel_tol) rep.consistent = false;
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace rbm
