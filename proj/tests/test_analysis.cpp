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

#include <doctest.h>

#include <cmath>

#include "rbm/analysis.hpp"
#include "test_helpers.hpp"

using namespace rbm;
using rbm::testing::cauchy_kernels;
using rbm::testing::make_system;
using rbm::testing::make_vec;
using rbm::testing::random_positions;
using rbm::testing::zero_kernels;

TEST_CASE("gamma factors: single species closed form") {
  {
    const auto spec = make_system({100}, {2}, 1, zero_kernels());
    CHECK(gamma_factors(spec)[0] ==
          doctest::Approx(1.0 - 1.0 / 99.0).epsilon(1e-15));
  }
  {
    const auto spec = make_system({100}, {100}, 1, zero_kernels());
    CHECK(gamma_factors(spec)[0] ==
          doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("gamma factors: pinned two-species values") {
  // N = (4,6), p = (2,2), b = (2,3). Term by term:
  //   Gamma_1 = [0 + 1/6 + 1/2] + [1 - 1/3]   = 4/3
  //   Gamma_2 = [1/2 + 1/4 + 3/4] + [1 - 1/5] = 23/10
  const auto spec = make_system({4, 6}, {2, 2}, 1, zero_kernels());
  const Vec g = gamma_factors(spec);
  CHECK(g[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(2.3).epsilon(1e-15));
}

TEST_CASE("gamma factors are non-increasing in the batch size") {
  // n = 1, N = 12: p in {2, 3, 4, 6, 12}
  double prev = 1e300;
  for (Index p : {2, 3, 4, 6, 12}) {
    const auto spec = make_system({12}, {p}, 1, zero_kernels());
    const double g = gamma_factors(spec)[0];
    CHECK(g <= prev + 1e-15);
    CHECK(g >= 0.0);
    prev = g;
  }
}

TEST_CASE("gamma factors are nonnegative over random valid configs") {
  RngStream rng(101);
  for (int t = 0; t < 10000; ++t) {
    const Index n = 1 + static_cast<Index>(rng.uniform_below(4));
    std::vector<Index> counts, batches;
    for (Index i = 0; i < n; ++i) {
      const Index p = 2 + static_cast<Index>(rng.uniform_below(6));
      const Index b = 1 + static_cast<Index>(rng.uniform_below(8));
      counts.push_back(p * b);
      batches.push_back(p);
    }
    const auto spec = make_system(counts, batches, 1, zero_kernels());
    const Vec g = gamma_factors(spec);
    for (Index i = 0; i < n; ++i) REQUIRE(g[i] >= -1e-12);
  }
}

TEST_CASE("theta and the gamma exponent") {
  {
    const auto spec = make_system({4, 6, 6}, {2, 2, 2}, 1, zero_kernels());
    CHECK(theta(spec) == doctest::Approx(1.5).epsilon(1e-15));  // b = (2,3,3)
  }
  {
    const auto spec = make_system({4, 4}, {2, 2}, 1, zero_kernels());
    CHECK(theta(spec) == 1.0);
    CHECK(gamma_exponent(spec) == 6.0);  // all q_i <= 1
  }
  {
    auto spec = make_system({4}, {2}, 1, zero_kernels());
    spec.species[0].potential = PotentialSpec::make_custom(
        [](const Vec&, Vec& g) { g.setZero(); }, 1.0, 3.0);
    CHECK(gamma_exponent(spec) == 12.0);
  }
}

namespace {

// The six pinned enumerable configurations for the oracle-equivalence check,
// spanning same/cross species, equal and unequal batch counts.
struct OracleConfig {
  std::vector<Index> counts, batches;
  std::vector<double> charges;
};

const std::vector<OracleConfig>& oracle_configs() {
  static const std::vector<OracleConfig> configs = {
      {{4}, {2}, {1.5}},
      {{6}, {3}, {-2.0}},
      {{4, 4}, {2, 2}, {-1.0, 2.0}},
      {{4, 6}, {2, 2}, {-1.0, 2.0}},   // unequal b, theta = 3/2
      {{6, 4}, {2, 2}, {2.0, 1.0}},
      {{4, 6}, {2, 3}, {1.0, -1.0}},
      {{4, 4, 4}, {2, 2, 2}, {-1.0, 2.0, -2.0}},
      {{4, 4, 6}, {2, 2, 2}, {-1.0, 2.0, -2.0}},
  };
  return configs;
}

}  // namespace

TEST_CASE("closed-form chi variance equals the enumeration oracle") {
  int config_index = 0;
  for (const auto& cfg : oracle_configs()) {
    CAPTURE(config_index);
    const auto spec = make_system(cfg.counts, cfg.batches, 2,
                                  cauchy_kernels(cfg.charges));
    const auto positions =
        random_positions(spec, 1000 + static_cast<std::uint64_t>(config_index));
    for (Index i = 0; i < spec.species_count(); ++i) {
      const Index k = (i * 2) % spec.species[i].particle_count;
      const auto exact = exact_chi_moments(positions, spec, i, k);
      const auto closed = closed_form_chi_variance(positions, spec, i, k);
      REQUIRE(exact.mean.norm() <= 1e-12);
      REQUIRE(std::abs(closed.variance - exact.variance) <=
              1e-12 * (1.0 + exact.variance));
    }
    ++config_index;
  }
}

TEST_CASE("single-species variance reduces to the spread term") {
  const auto spec = make_system({6}, {2}, 1, cauchy_kernels({1.7}));
  const auto positions = random_positions(spec, 21);
  const auto v = closed_form_chi_variance(positions, spec, 0, 3);
  const double coeff = 1.0 / (2.0 - 1.0) - 1.0 / (6.0 - 1.0);
  CHECK(v.variance == doctest::Approx(coeff * v.a_same).epsilon(1e-14));
  CHECK(v.a_pair.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("equal sizes: cross-species double sum vanishes and the "
          "coefficients collapse to (1/p - 1/N)") {
  // The same-species numbers N_i = N and b_i = b kill the j != j' term, and
  // the remaining cross coefficients become -(1/p - 1/N) on A_i^j and
  // +(1/p - 1/N) on A_{i,1}^j (the enumeration oracle pins the signs).
  const auto spec =
      make_system({4, 4, 4}, {2, 2, 2}, 2, cauchy_kernels({-1.0, 2.0, -2.0}));
  const auto positions = random_positions(spec, 33);
  const auto v = closed_form_chi_variance(positions, spec, 1, 0);
  const double c = 1.0 / 2.0 - 1.0 / 4.0;
  double expected = (1.0 / (2.0 - 1.0) - 1.0 / (4.0 - 1.0)) * v.a_same;
  for (Index j = 0; j < 3; ++j) {
    if (j == 1) continue;
    expected += c * (v.a_diag[j] - v.a_pair[j]);
  }
  CHECK(v.variance == doctest::Approx(expected).epsilon(1e-13));
  const auto exact = exact_chi_moments(positions, spec, 1, 0);
  CHECK(std::abs(v.variance - exact.variance) <=
        1e-12 * (1.0 + exact.variance));
}

TEST_CASE("zero kernels have zero remainder variance") {
  const auto spec = make_system({4, 6}, {2, 2}, 1, zero_kernels());
  const auto positions = random_positions(spec, 3);
  CHECK(closed_form_chi_variance(positions, spec, 0, 0).variance == 0.0);
}

TEST_CASE("monte carlo moments agree with enumeration within four sigma") {
  const auto spec = make_system({4, 6}, {2, 2}, 2, cauchy_kernels({-1.0, 2.0}));
  const auto positions = random_positions(spec, 8);
  const auto exact = exact_chi_moments(positions, spec, 0, 0);
  RngStream rng(77);
  const auto mc = empirical_chi_moments(positions, spec, 0, 0, 100000, rng);
  CHECK(mc.mean.norm() <= 4.0 * mc.mean_se);
  CHECK(std::abs(mc.variance - exact.variance) <= 4.0 * mc.variance_se);
}

TEST_CASE("monte carlo moments require two samples") {
  const auto spec = make_system({4}, {2}, 1, cauchy_kernels({1.0}));
  const auto positions = random_positions(spec, 2);
  RngStream rng(5);
  CHECK_THROWS_AS(empirical_chi_moments(positions, spec, 0, 0, 1, rng),
                  ConfigError);
}

TEST_CASE("remainder variance respects the theory bound") {
  RngStream seeder(404);
  for (int t = 0; t < 6; ++t) {
    const auto& cfg = oracle_configs()[t];
    const auto spec = make_system(cfg.counts, cfg.batches, 2,
                                  cauchy_kernels(cfg.charges));
    const auto positions = random_positions(spec, seeder.next_u64());
    const auto constants = theory_constants(spec);
    REQUIRE(constants.variance_bound_known);
    const auto exact = exact_chi_moments(positions, spec, 0, 0);
    CHECK(exact.variance <= constants.variance_bound * (1.0 + 1e-12));
  }
}

TEST_CASE("discrete l2 error") {
  ParticleState a, b;
  a.positions = {PosMat::Zero(4, 2)};
  b.positions = {PosMat::Zero(4, 2)};
  CHECK(discrete_l2_error(a, b) == 0.0);
  b.positions[0](2, 0) = 3.0;
  b.positions[0](2, 1) = 4.0;
  CHECK(discrete_l2_error(a, b) == doctest::Approx(2.5).epsilon(1e-15));
  // pairing is by index: permuting changes the value
  ParticleState c;
  c.positions = {PosMat::Zero(4, 2)};
  c.positions[0](1, 0) = 3.0;
  c.positions[0](1, 1) = 4.0;
  CHECK(discrete_l2_error(b, c) > 0.0);
  ParticleState bad;
  bad.positions = {PosMat::Zero(3, 2)};
  CHECK_THROWS_AS(discrete_l2_error(a, bad), ConfigError);
}

TEST_CASE("slope fitting") {
  SUBCASE("exact half-order data") {
    std::vector<std::pair<double, double>> pts;
    for (double tau : {0.25, 0.125, 0.0625, 0.03125}) {
      pts.emplace_back(tau, 3.0 * std::sqrt(tau));
    }
    const auto fit = convergence_slope(pts);
    REQUIRE(fit.valid);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.residual <= 1e-12);
  }
  SUBCASE("exact first-order data") {
    std::vector<std::pair<double, double>> pts;
    for (double tau : {0.5, 0.25, 0.125}) pts.emplace_back(tau, 0.7 * tau);
    const auto fit = convergence_slope(pts);
    REQUIRE(fit.valid);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero errors are excluded with a warning count") {
    std::vector<std::pair<double, double>> pts = {
        {0.5, 0.0}, {0.25, 0.0}, {0.125, 0.0}};
    const auto fit = convergence_slope(pts);
    CHECK(!fit.valid);
    CHECK(fit.excluded_zero_points == 3);
  }
  SUBCASE("too few points") {
    CHECK(!convergence_slope({{0.5, 1.0}, {0.25, 0.5}}).valid);
  }
}

TEST_CASE("kernel evaluation counts: closed forms") {
  {
    const auto spec = make_system({4}, {2}, 1, cauchy_kernels({1.0}));
    RngStream rng(1);
    const auto rep = kernel_eval_counts(spec, sample_partition(spec, rng));
    CHECK(rep.full_kernel_evals_per_step == 12);
    CHECK(rep.rbm_kernel_evals_per_step == 4);
  }
  {
    const auto spec = make_system({4, 4}, {2, 2}, 1, cauchy_kernels({1., 1.}));
    RngStream rng(1);
    const auto rep = kernel_eval_counts(spec, sample_partition(spec, rng));
    CHECK(rep.full_kernel_evals_per_step == 56);
    CHECK(rep.rbm_kernel_evals_per_step == 24);
  }
  {
    // p = N: the two counts coincide and the ratio is exactly one.
    const auto spec = make_system({4, 6}, {4, 6}, 1, cauchy_kernels({1., 1.}));
    RngStream rng(1);
    const auto rep = kernel_eval_counts(spec, sample_partition(spec, rng));
    CHECK(rep.full_kernel_evals_per_step == rep.rbm_kernel_evals_per_step);
    CHECK(rep.eval_ratio == 1.0);
  }
}

TEST_CASE("kernel evaluation counts match the runtime counter exactly") {
  RngStream seeder(2025);
  for (int t = 0; t < 12; ++t) {
    const Index n = 1 + static_cast<Index>(seeder.uniform_below(3));
    std::vector<Index> counts, batches;
    std::vector<double> charges;
    for (Index i = 0; i < n; ++i) {
      const Index p = 2 + static_cast<Index>(seeder.uniform_below(3));
      const Index b = 1 + static_cast<Index>(seeder.uniform_below(3));
      counts.push_back(p * b);
      batches.push_back(p);
      charges.push_back(1.0 + static_cast<double>(i));
    }
    const auto spec = make_system(counts, batches, 2, cauchy_kernels(charges));
    const auto coeffs = interaction_coefficients(spec);
    const auto positions = random_positions(spec, seeder.next_u64());
    RngStream rng(seeder.next_u64());
    const Partition part = sample_partition(spec, rng);
    const auto rep = kernel_eval_counts(spec, part);

    std::uint64_t full_count = 0, rbm_count = 0;
    Vec out;
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < spec.species[i].particle_count; ++k) {
        full_drift(spec, coeffs, positions, i, k, out, full_count);
        rbm_drift(spec, coeffs, positions, part, i, k, out, rbm_count);
      }
    }
    REQUIRE(rep.full_kernel_evals_per_step == full_count);
    REQUIRE(rep.rbm_kernel_evals_per_step == rbm_count);
  }
}

TEST_CASE("histograms") {
  SUBCASE("all mass in one bin") {
    const auto h = histogram(std::vector<double>(50, 0.35), 10, 0.0, 1.0);
    CHECK(h.density[3] == doctest::Approx(10.0));  // 1 / bin width
    for (int b = 0; b < 10; ++b) {
      if (b != 3) CHECK(h.density[b] == 0.0);
    }
  }
  SUBCASE("uniform synthetic data is flat within sampling noise") {
    RngStream rng(6);
    std::vector<double> xs(200000);
    for (auto& x : xs) x = rng.uniform();
    const auto h = histogram(xs, 20, 0.0, 1.0);
    for (double v : h.density) CHECK(std::abs(v - 1.0) < 0.05);
    CHECK(h.below_fraction == 0.0);
    CHECK(h.above_fraction == 0.0);
  }
  SUBCASE("out-of-range mass is reported separately") {
    const std::vector<double> xs = {-1.0, 0.5, 0.5, 2.0};
    const auto h = histogram(xs, 4, 0.0, 1.0);
    CHECK(h.below_fraction == 0.25);
    CHECK(h.above_fraction == 0.25);
    double mass = 0.0;
    for (double v : h.density) mass += v * h.bin_width();
    CHECK(mass == doctest::Approx(0.5));
  }
  SUBCASE("empty species rejected") {
    CHECK_THROWS_AS(histogram(std::vector<double>{}, 4, 0.0, 1.0),
                    ConfigError);
  }
  SUBCASE("overlap coefficient") {
    const auto a = histogram(std::vector<double>{0.1, 0.2, 0.3}, 10, 0.0, 1.0);
    const auto b = histogram(std::vector<double>{0.7, 0.8, 0.9}, 10, 0.0, 1.0);
    CHECK(overlap_coefficient(a, b) == 0.0);
    CHECK(overlap_coefficient(a, a) == doctest::Approx(1.0));
  }
}

TEST_CASE("consistency report: enumeration mode verdicts") {
  const auto spec = make_system({4, 6}, {2, 2}, 2, cauchy_kernels({-1., 2.}));
  const auto positions = random_positions(spec, 99);
  const auto good = consistency_report(spec, positions, false, 0, 1000000, 1);
  CHECK(good.consistent);
  CHECK(good.max_mean_norm <= 1e-12);
  CHECK(good.max_variance_discrepancy <= 1e-12);
  const auto bad = consistency_report(spec, positions, false, 0, 1000000, 1,
                                      /*legacy_beta=*/true);
  CHECK(!bad.consistent);
  CHECK(bad.max_mean_norm > 1e-3);
}
