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

#ifndef RBMSIM_TEST_HELPERS_HPP
#define RBMSIM_TEST_HELPERS_HPP

#include <functional>
#include <vector>

#include "rbm/dynamics.hpp"
#include "rbm/model.hpp"
#include "rbm/rng.hpp"

namespace rbm::testing {

/// Small system with every kernel produced by one factory and zero-noise
/// additive diffusion unless overridden.
inline SystemSpec make_system(
    const std::vector<Index>& counts, const std::vector<Index>& batch_sizes,
    Index dimension,
    const std::function<KernelSpec(Index, Index)>& kernel_factory,
    double sigma = 0.0, double end_time = 1.0, double tau = 0.5) {
  SystemSpec spec;
  spec.dimension = dimension;
  spec.end_time = end_time;
  spec.tau = tau;
  const Index n = static_cast<Index>(counts.size());
  for (Index i = 0; i < n; ++i) {
    SpeciesSpec s;
    s.particle_count = counts[i];
    s.batch_size = batch_sizes[i];
    s.diffusion = DiffusionSpec::additive(sigma);
    s.potential = PotentialSpec::none();
    s.init = InitialDistribution::gaussian_centered(1.0, dimension);
    spec.species.push_back(std::move(s));
  }
  spec.kernels.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      spec.kernels[i].push_back(kernel_factory(i, j));
    }
  }
  return spec;
}

/// Seeded positions with entries in a moderate range.
inline std::vector<PosMat> random_positions(const SystemSpec& spec,
                                            std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<PosMat> out;
  for (const auto& s : spec.species) {
    PosMat m(s.particle_count, spec.dimension);
    for (Index k = 0; k < m.rows(); ++k) {
      for (Index t = 0; t < m.cols(); ++t) m(k, t) = 2.0 * rng.normal();
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Index>(xs.size()));
  Index t = 0;
  for (double x : xs) v[t++] = x;
  return v;
}

/// Cauchy kernels with per-species charges, as in the convergence test model.
inline std::function<KernelSpec(Index, Index)> cauchy_kernels(
    std::vector<double> charges) {
  return [charges](Index i, Index j) {
    return KernelSpec::scaled_cauchy(charges[i], charges[j]);
  };
}

inline std::function<KernelSpec(Index, Index)> zero_kernels() {
  return [](Index, Index) { return KernelSpec::zero(); };
}

}  // namespace rbm::testing

#endif  // RBMSIM_TEST_HELPERS_HPP
