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
#include <map>
#include <set>

#include "rbm/batching.hpp"
#include "test_helpers.hpp"

using namespace rbm;
using rbm::testing::make_system;
using rbm::testing::zero_kernels;

TEST_CASE("interaction coefficients") {
  SUBCASE("single species alpha") {
    const auto spec = make_system({100}, {2}, 1, zero_kernels());
    const auto t = interaction_coefficients(spec);
    CHECK(t.alpha(0, 0) == doctest::Approx(1.0 / 99.0).epsilon(1e-15));
    CHECK(t.beta(0, 0) == doctest::Approx(1.0).epsilon(1e-15));  // 2/(1*2)
  }
  SUBCASE("multi-species beta with unequal batch counts") {
    // N = (4,6), p = (2,2) => b = (2,3): beta_21 = 3/(2*min{3,2}) = 3/4.
    const auto spec = make_system({4, 6}, {2, 2}, 1, zero_kernels());
    const auto t = interaction_coefficients(spec);
    CHECK(t.beta(1, 0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(t.beta(0, 1) == doctest::Approx(2.0 / (2.0 * 2.0)).epsilon(1e-15));
  }
  SUBCASE("equal batch counts reduce to 1/p_j and 1/(p_i - 1)") {
    const auto spec = make_system({6, 9}, {2, 3}, 1, zero_kernels());  // b = 3
    const auto t = interaction_coefficients(spec);
    CHECK(t.beta(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(t.beta(1, 0) == doctest::Approx(1.0 / 2.0).epsilon(1e-15));
    CHECK(t.beta(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.beta(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("legacy table drops the batch-count correction") {
    const auto spec = make_system({4, 6}, {2, 2}, 1, zero_kernels());
    const auto t = interaction_coefficients(spec, /*legacy=*/true);
    CHECK(t.beta(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(t.alpha == interaction_coefficients(spec).alpha);
  }
}

TEST_CASE("sampled partitions have exact block structure") {
  const auto spec = make_system({12, 6}, {3, 2}, 1, zero_kernels());
  RngStream rng(11);
  for (int t = 0; t < 50; ++t) {
    const Partition part = sample_partition(spec, rng);
    REQUIRE(part.batch_count(0) == 4);
    REQUIRE(part.batch_count(1) == 3);
    for (Index i = 0; i < 2; ++i) {
      std::set<std::int32_t> seen;
      for (std::int32_t r = 0; r < part.batch_count(i); ++r) {
        const auto& blk = part.block(i, r);
        REQUIRE(static_cast<Index>(blk.size()) == spec.species[i].batch_size);
        for (auto k : blk) seen.insert(k);
      }
      REQUIRE(static_cast<Index>(seen.size()) ==
              spec.species[i].particle_count);
    }
  }
}

TEST_CASE("sampling is deterministic per stream state") {
  const auto spec = make_system({8, 4}, {2, 2}, 1, zero_kernels());
  RngStream a(99), b(99);
  for (int t = 0; t < 10; ++t) {
    CHECK(sample_partition(spec, a) == sample_partition(spec, b));
  }
}

TEST_CASE("full batch is the unique partition") {
  const auto spec = make_system({6}, {6}, 1, zero_kernels());
  RngStream rng(3);
  const Partition part = sample_partition(spec, rng);
  for (Index k = 0; k < 6; ++k) CHECK(part.label(0, k) == 0);
  CHECK(enumeration_count(spec) == 1);
}

TEST_CASE("shuffle-and-chunk sampling is uniform over ordered partitions") {
  // N = 4, p = 2: six ordered partitions, each expected with frequency 1/6.
  const auto spec = make_system({4}, {2}, 1, zero_kernels());
  RngStream rng(2024);
  std::map<std::vector<std::int32_t>, int> counts;
  const int samples = 100000;
  for (int t = 0; t < samples; ++t) {
    counts[sample_partition(spec, rng).labels()[0]]++;
  }
  REQUIRE(counts.size() == 6);
  double chi2 = 0.0;
  for (const auto& [labels, c] : counts) {
    const double expected = samples / 6.0;
    chi2 += (c - expected) * (c - expected) / expected;
    CHECK(std::abs(c / static_cast<double>(samples) - 1.0 / 6.0) < 0.01);
  }
  // chi-square with 5 dof: 20.5 is far beyond the 0.999 quantile
  CHECK(chi2 < 20.5);
}

TEST_CASE("per-label membership is uniform") {
  const auto spec = make_system({6, 6}, {2, 3}, 1, zero_kernels());
  RngStream rng(5);
  const int samples = 60000;
  std::vector<int> hits(3, 0);  // species 1 has b = 3 labels, track particle 0
  for (int t = 0; t < samples; ++t) {
    const Partition part = sample_partition(spec, rng);
    hits[part.label(0, 0)]++;
  }
  for (int r = 0; r < 3; ++r) {
    CHECK(std::abs(hits[r] / static_cast<double>(samples) - 1.0 / 3.0) < 0.01);
  }
}

TEST_CASE("enumeration counts") {
  CHECK(enumeration_count(make_system({4}, {2}, 1, zero_kernels())) == 6);
  CHECK(enumeration_count(make_system({6}, {2}, 1, zero_kernels())) == 90);
  CHECK(enumeration_count(make_system({4, 4}, {2, 2}, 1, zero_kernels())) ==
        36);
  CHECK(enumeration_count(make_system({4, 6}, {2, 2}, 1, zero_kernels())) ==
        540);
}

TEST_CASE("enumeration visits each joint partition exactly once") {
  const auto spec = make_system({4, 4}, {2, 2}, 1, zero_kernels());
  std::set<std::vector<std::vector<std::int32_t>>> seen;
  enumerate_partitions(spec, [&](const Partition& p) { seen.insert(p.labels()); });
  CHECK(seen.size() == 36);
}

TEST_CASE("enumeration factorizes across species") {
  // Joint marginals: each species-0 labeling appears exactly as many times
  // as there are species-1 labelings (independence of species).
  const auto spec = make_system({4, 6}, {2, 2}, 1, zero_kernels());
  std::map<std::vector<std::int32_t>, int> marginal0;
  std::uint64_t total = 0;
  enumerate_partitions(spec, [&](const Partition& p) {
    marginal0[p.labels()[0]]++;
    ++total;
  });
  CHECK(total == 540);
  REQUIRE(marginal0.size() == 6);
  for (const auto& [labels, c] : marginal0) CHECK(c == 90);
}

TEST_CASE("enumeration cap is enforced") {
  const auto spec = make_system({12, 12}, {2, 2}, 1, zero_kernels());
  CHECK_THROWS_AS(enumerate_partitions(spec, [](const Partition&) {}, 1000),
                  EnumerationTooLargeError);
}

TEST_CASE("inclusion indicator basics") {
  const auto spec = make_system({4, 6}, {2, 2}, 1, zero_kernels());
  // Hand-built partition: species 0 blocks {0,1},{2,3}; species 1 blocks
  // {0,1},{2,3},{4,5}.
  Partition part(spec, {{0, 0, 1, 1}, {0, 0, 1, 1, 2, 2}});
  CHECK(inclusion_indicator(part, 0, 0, 0, 1) == 1);
  CHECK(inclusion_indicator(part, 0, 0, 0, 2) == 0);
  CHECK(inclusion_indicator(part, 0, 0, 1, 0) == 1);
  CHECK(inclusion_indicator(part, 0, 0, 0, 0) == 0);  // self-pair convention
  // Species-1 particles with label 2 meet nobody in species 0 (b_0 = 2).
  CHECK(inclusion_indicator(part, 1, 4, 0, 0) == 0);
  CHECK(inclusion_indicator(part, 1, 4, 1, 5) == 1);
  CHECK_THROWS(inclusion_indicator(part, 0, 0, 2, 0));
}

namespace {

double enum_mean_inclusion(const SystemSpec& spec, Index i, Index k, Index j,
                           Index l) {
  double sum = 0.0;
  std::uint64_t count = 0;
  enumerate_partitions(spec, [&](const Partition& p) {
    sum += inclusion_indicator(p, i, k, j, l);
    ++count;
  });
  return sum / static_cast<double>(count);
}

double enum_mean_inclusion_product(const SystemSpec& spec, Index i, Index k,
                                   Index j, Index l, Index jp, Index lp) {
  double sum = 0.0;
  std::uint64_t count = 0;
  enumerate_partitions(spec, [&](const Partition& p) {
    sum += inclusion_indicator(p, i, k, j, l) *
           inclusion_indicator(p, i, k, jp, lp);
    ++count;
  });
  return sum / static_cast<double>(count);
}

}  // namespace

TEST_CASE("inclusion probabilities match the closed forms") {
  SUBCASE("same species: (p-1)/(N-1)") {
    const auto spec = make_system({4}, {2}, 1, zero_kernels());
    CHECK(enum_mean_inclusion(spec, 0, 0, 0, 1) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  }
  SUBCASE("cross species: min{b_i,b_j}/(b_i b_j)") {
    const auto spec = make_system({4, 6}, {2, 2}, 1, zero_kernels());
    // b = (2,3): 2/(2*3) = 1/3 either way around.
    CHECK(enum_mean_inclusion(spec, 0, 0, 1, 0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(enum_mean_inclusion(spec, 1, 0, 0, 0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(enum_mean_inclusion(spec, 1, 0, 1, 1) ==
          doctest::Approx(1.0 / 5.0).epsilon(1e-13));
  }
}

TEST_CASE("pairwise joint inclusion probabilities match the five cases") {
  const auto spec446 = make_system({4, 4, 6}, {2, 2, 2}, 1, zero_kernels());
  const double b1 = 2, b2 = 2, b3 = 3;

  // Case 1: j, j' both different from i and from each other.
  CHECK(enum_mean_inclusion_product(spec446, 0, 0, 1, 0, 2, 0) ==
        doctest::Approx(std::min({b1, b2, b3}) / (b1 * b2 * b3))
            .epsilon(1e-13));

  // Case 2: same foreign species, two distinct partners.
  {
    const auto spec = make_system({4, 6}, {2, 2}, 1, zero_kernels());
    const double expected = std::min(2.0, 3.0) * (2.0 - 1.0) /
                            (2.0 * 3.0 * (6.0 - 1.0));
    CHECK(enum_mean_inclusion_product(spec, 0, 0, 1, 0, 1, 1) ==
          doctest::Approx(expected).epsilon(1e-13));
  }

  // Case 3: one foreign partner, one same-species partner.
  {
    const auto spec = make_system({4, 6}, {2, 2}, 1, zero_kernels());
    const double expected = std::min(2.0, 3.0) * (2.0 - 1.0) /
                            (2.0 * 3.0 * (4.0 - 1.0));
    CHECK(enum_mean_inclusion_product(spec, 0, 0, 1, 0, 0, 1) ==
          doctest::Approx(expected).epsilon(1e-13));
  }

  // Case 4: two distinct same-species partners; needs p >= 3 to be nonzero.
  {
    const auto spec = make_system({6}, {3}, 1, zero_kernels());
    const double expected = (3.0 - 1.0) * (3.0 - 2.0) / ((6.0 - 1.0) * (6.0 - 2.0));
    CHECK(enum_mean_inclusion_product(spec, 0, 0, 0, 1, 0, 2) ==
          doctest::Approx(expected).epsilon(1e-13));
    // and with p = 2 the same probability is exactly zero
    const auto spec2 = make_system({4}, {2}, 1, zero_kernels());
    CHECK(enum_mean_inclusion_product(spec2, 0, 0, 0, 1, 0, 2) == 0.0);
  }

  // Case 5: repeated same-species partner reduces to E I.
  {
    const auto spec = make_system({6}, {3}, 1, zero_kernels());
    CHECK(enum_mean_inclusion_product(spec, 0, 0, 0, 1, 0, 1) ==
          doctest::Approx((3.0 - 1.0) / (6.0 - 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("partitions serialize to json") {
  const auto spec = make_system({4}, {2}, 1, zero_kernels());
  Partition part(spec, {{0, 1, 0, 1}});
  CHECK(part.to_json() == "{\"species\":[[1,2,1,2]]}");
}
