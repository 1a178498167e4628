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

#ifndef RBMSIM_BATCHING_HPP
#define RBMSIM_BATCHING_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rbm/common.hpp"
#include "rbm/model.hpp"
#include "rbm/rng.hpp"

namespace rbm {

// One random division of every species into labeled batches of exact size
// p_i. Labels r in [0, b_i); the super-batch C_r is the union over species of
// the r-th blocks (empty contribution from species with b_j <= r). Immutable
// once built.
class Partition {
 public:
  Partition(const SystemSpec& spec,
            std::vector<std::vector<std::int32_t>> labels);

  /// Batch label of particle k of species i.
  std::int32_t label(Index i, Index k) const { return labels_[i][k]; }

  /// Members of block r of species i (empty for r >= b_i).
  const std::vector<std::int32_t>& block(Index i, std::int32_t r) const;

  Index species_count() const { return static_cast<Index>(labels_.size()); }
  Index batch_count(Index i) const {
    return static_cast<Index>(blocks_[i].size());
  }
  Index max_batch_count() const { return max_batch_count_; }

  const std::vector<std::vector<std::int32_t>>& labels() const {
    return labels_;
  }

  std::string to_json() const;

  bool operator==(const Partition& other) const {
    return labels_ == other.labels_;
  }

 private:
  std::vector<std::vector<std::int32_t>> labels_;  // per species, per particle
  std::vector<std::vector<std::vector<std::int32_t>>> blocks_;
  Index max_batch_count_ = 0;
  static const std::vector<std::int32_t> kEmptyBlock;
};

// alpha_ij = 1/(N_j - delta_ij)          (full interaction weights)
// beta_ij  = b_i/((p_j - delta_ij) min{b_i, b_j})   (random-batch weights)
//
// `legacy` drops the b_i/min{b_i,b_j} factor, reproducing the single-species
// weights without the multi-species correction; it exists as a negative
// control and is inconsistent whenever batch counts differ.
struct CoefficientTable {
  Mat alpha;
  Mat beta;
};

CoefficientTable interaction_coefficients(const SystemSpec& spec,
                                          bool legacy = false);

/// Uniform random ordered partition per species: unbiased Fisher-Yates
/// shuffle, then chunking into consecutive blocks of p_i. Species are
/// partitioned independently. A species with b_i = 1 has a unique partition
/// and consumes no randomness.
Partition sample_partition(const SystemSpec& spec, RngStream& rng);

/// 1 iff (i,k) and (j,l) lie in the same super-batch; 0 for the self-pair
/// (i,k) == (j,l). Out-of-range indices raise.
int inclusion_indicator(const Partition& partition, Index i, Index k, Index j,
                        Index l);

/// Number of joint ordered partitions, prod_i N_i! / (p_i!)^{b_i}.
/// Saturates at uint64 max on overflow.
std::uint64_t enumeration_count(const SystemSpec& spec);

/// Visits every joint ordered partition exactly once (uniform weights).
/// Refuses with EnumerationTooLargeError when the count exceeds `cap`.
void enumerate_partitions(const SystemSpec& spec,
                          const std::function<void(const Partition&)>& visit,
                          std::uint64_t cap = 1000000);

}  // namespace rbm

#endif  // RBMSIM_BATCHING_HPP
