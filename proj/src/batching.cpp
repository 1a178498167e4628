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

#include "rbm/batching.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace rbm {

const std::vector<std::int32_t> Partition::kEmptyBlock;

Partition::Partition(const SystemSpec& spec,
                     std::vector<std::vector<std::int32_t>> labels)
    : labels_(std::move(labels)) {
  const Index n = spec.species_count();
  if (static_cast<Index>(labels_.size()) != n) {
    throw ConfigError("partition: wrong number of species");
  }
  blocks_.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Index b = spec.species[i].batch_count();
    const Index p = spec.species[i].batch_size;
    if (static_cast<Index>(labels_[i].size()) != spec.species[i].particle_count) {
      throw ConfigError("partition: wrong assignment length");
    }
    blocks_[i].assign(b, {});
    for (auto& blk : blocks_[i]) blk.reserve(p);
    for (Index k = 0; k < static_cast<Index>(labels_[i].size()); ++k) {
      const std::int32_t r = labels_[i][k];
      if (r < 0 || r >= b) throw ConfigError("partition: label out of range");
      blocks_[i][r].push_back(static_cast<std::int32_t>(k));
    }
    for (const auto& blk : blocks_[i]) {
      if (static_cast<Index>(blk.size()) != p) {
        throw ConfigError("partition: block size mismatch");
      }
    }
    max_batch_count_ = std::max(max_batch_count_, b);
  }
}

const std::vector<std::int32_t>& Partition::block(Index i,
                                                  std::int32_t r) const {
  const auto& per_species = blocks_.at(i);
  if (r < 0 || r >= static_cast<std::int32_t>(per_species.size())) {
    return kEmptyBlock;
  }
  return per_species[r];
}

std::string Partition::to_json() const {
  std::ostringstream os;
  os << "{\"species\":[";
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i) os << ",";
    os << "[";
    for (std::size_t k = 0; k < labels_[i].size(); ++k) {
      if (k) os << ",";
      os << labels_[i][k] + 1;  // 1-based labels on the wire
    }
    os << "]";
  }
  os << "]}";
  return os.str();
}

CoefficientTable interaction_coefficients(const SystemSpec& spec,
                                          bool legacy) {
  const Index n = spec.species_count();
  CoefficientTable t;
  t.alpha.resize(n, n);
  t.beta.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    const double bi = static_cast<double>(spec.species[i].batch_count());
    for (Index j = 0; j < n; ++j) {
      const double nj = static_cast<double>(spec.species[j].particle_count);
      const double pj = static_cast<double>(spec.species[j].batch_size);
      const double bj = static_cast<double>(spec.species[j].batch_count());
      const double delta = (i == j) ? 1.0 : 0.0;
      t.alpha(i, j) = 1.0 / (nj - delta);
      t.beta(i, j) = legacy ? 1.0 / (pj - delta)
                            : bi / ((pj - delta) * std::min(bi, bj));
    }
  }
  return t;
}

Partition sample_partition(const SystemSpec& spec, RngStream& rng) {
  const Index n = spec.species_count();
  std::vector<std::vector<std::int32_t>> labels(n);
  std::vector<std::int32_t> order;
  for (Index i = 0; i < n; ++i) {
    const Index N = spec.species[i].particle_count;
    const Index p = spec.species[i].batch_size;
    labels[i].resize(N);
    if (spec.species[i].batch_count() == 1) {
      std::fill(labels[i].begin(), labels[i].end(), 0);
      continue;
    }
    order.resize(N);
    std::iota(order.begin(), order.end(), 0);
    for (Index k = N - 1; k > 0; --k) {
      const auto j = static_cast<Index>(
          rng.uniform_below(static_cast<std::uint64_t>(k) + 1));
      std::swap(order[k], order[j]);
    }
    for (Index pos = 0; pos < N; ++pos) {
      labels[i][order[pos]] = static_cast<std::int32_t>(pos / p);
    }
  }
  return Partition(spec, std::move(labels));
}

int inclusion_indicator(const Partition& partition, Index i, Index k, Index j,
                        Index l) {
  const auto& labels = partition.labels();
  if (i < 0 || i >= static_cast<Index>(labels.size()) || j < 0 ||
      j >= static_cast<Index>(labels.size()) || k < 0 ||
      k >= static_cast<Index>(labels[i].size()) || l < 0 ||
      l >= static_cast<Index>(labels[j].size())) {
    throw ConfigError("inclusion_indicator: index out of range");
  }
  if (i == j && k == l) return 0;  // self-pairs are excluded upstream
  return labels[i][k] == labels[j][l] ? 1 : 0;
}

namespace {

std::uint64_t per_species_count(Index N, Index p) {
  // N! / (p!)^b without overflow for the sizes the cap admits: build the
  // product incrementally as binomial(N, p) * binomial(N-p, p) * ...
  if (p < 1 || N % p != 0) {
    throw ConfigError("enumeration: batch size must divide particle count");
  }
  std::uint64_t total = 1;
  for (Index rem = N; rem > 0; rem -= p) {
    // binomial(rem, p)
    std::uint64_t c = 1;
    for (Index t = 1; t <= p; ++t) {
      const std::uint64_t num = static_cast<std::uint64_t>(rem - p + t);
      if (c > ~std::uint64_t{0} / num) return ~std::uint64_t{0};
      c = c * num / static_cast<std::uint64_t>(t);
    }
    if (total > ~std::uint64_t{0} / c) return ~std::uint64_t{0};
    total *= c;
  }
  return total;
}

// Recursively assigns block labels for one species: block 0 takes any
// p-subset of all particles, block 1 any p-subset of the rest, and so on.
// Blocks are labeled, so this yields every ordered partition exactly once,
// N!/(p!)^b in total.
class SpeciesEnumerator {
 public:
  SpeciesEnumerator(Index N, Index p) : N_(N), p_(p), labels_(N, -1) {}

  void run(const std::function<void(const std::vector<std::int32_t>&)>& emit) {
    emit_ = &emit;
    fill_block(0);
  }

 private:
  void fill_block(std::int32_t r) {
    if (static_cast<Index>(r) * p_ == N_) {
      (*emit_)(labels_);
      return;
    }
    std::vector<Index> unlabeled;
    for (Index k = 0; k < N_; ++k) {
      if (labels_[k] < 0) unlabeled.push_back(k);
    }
    choose(r, unlabeled, 0, p_);
  }

  void choose(std::int32_t r, const std::vector<Index>& pool, std::size_t from,
              Index need) {
    if (need == 0) {
      fill_block(r + 1);
      return;
    }
    for (std::size_t t = from;
         t + static_cast<std::size_t>(need) <= pool.size(); ++t) {
      labels_[pool[t]] = r;
      choose(r, pool, t + 1, need - 1);
      labels_[pool[t]] = -1;
    }
  }

  Index N_, p_;
  std::vector<std::int32_t> labels_;
  const std::function<void(const std::vector<std::int32_t>&)>* emit_ = nullptr;
};

}  // namespace

std::uint64_t enumeration_count(const SystemSpec& spec) {
  std::uint64_t total = 1;
  for (const auto& s : spec.species) {
    const std::uint64_t c = per_species_count(s.particle_count, s.batch_size);
    if (total > ~std::uint64_t{0} / std::max<std::uint64_t>(c, 1)) {
      return ~std::uint64_t{0};
    }
    total *= c;
  }
  return total;
}

void enumerate_partitions(const SystemSpec& spec,
                          const std::function<void(const Partition&)>& visit,
                          std::uint64_t cap) {
  const std::uint64_t count = enumeration_count(spec);
  if (count > cap) {
    throw EnumerationTooLargeError(
        "too large to enumerate: " + std::to_string(count) +
        " joint partitions exceed the cap of " + std::to_string(cap));
  }
  const Index n = spec.species_count();

  // Enumerate each species' labelings once, then walk the Cartesian product.
  std::vector<std::vector<std::vector<std::int32_t>>> per_species(n);
  for (Index i = 0; i < n; ++i) {
    SpeciesEnumerator e(spec.species[i].particle_count,
                        spec.species[i].batch_size);
    e.run([&](const std::vector<std::int32_t>& labels) {
      per_species[i].push_back(labels);
    });
  }

  std::vector<std::size_t> cursor(n, 0);
  std::vector<std::vector<std::int32_t>> joint(n);
  for (;;) {
    for (Index i = 0; i < n; ++i) joint[i] = per_species[i][cursor[i]];
    visit(Partition(spec, joint));
    Index i = n - 1;
    for (; i >= 0; --i) {
      if (++cursor[i] < per_species[i].size()) break;
      cursor[i] = 0;
    }
    if (i < 0) break;
  }
}

}  // namespace rbm
