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

#ifndef RBMSIM_SCENARIOS_HPP
#define RBMSIM_SCENARIOS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rbm/common.hpp"
#include "rbm/model.hpp"

namespace rbm {

struct RunParams {
  std::vector<double> tau_list;      // for convergence studies
  int replicas = 1;
  std::uint64_t seed = 1;
  std::vector<double> record_times;  // empty means {0, T}
  int ref_refinement = 2;            // s: reference step tau / 2^s
  bool noise_as_drift = false;       // replace sigma dB by the literal
                                     // sigma dt drift variant
};

struct Scenario {
  std::string name;
  SystemSpec system;
  RunParams run;
  std::vector<std::string> notes;              // recorded experiment variants
  std::vector<std::string> acceptance_checks;  // which checks apply
};

/// Shipped presets: "test3" (three-species convergence test; particle counts
/// selectable among the three published sizes), "population3" (segregating
/// population model), "opinion_submissive" / "opinion_obedient" (hierarchical
/// company). Unknown names raise ConfigError.
Scenario preset(const std::string& name);

const std::vector<std::string>& preset_names();

/// Allowed particle-count variants for test3 (per-species triples).
const std::vector<std::vector<Index>>& test3_count_variants();

/// Parses the plain-text configuration grammar (sections [system],
/// [species.i], [kernel.i.j], [run]). Unknown keys are errors unless
/// `lenient`, in which case they are reported through `warnings`.
/// Semantic errors are routed through validate_system.
Scenario load_config(const std::string& text, bool lenient = false,
                     std::vector<std::string>* warnings = nullptr);

/// Normalized config text; load_config(serialize_config(s)) reproduces s.
std::string serialize_config(const Scenario& scenario);

std::string scenario_to_json(const Scenario& scenario);

/// Structural equality over config-expressible content (built-in forms,
/// counts, run parameters). Custom callables never compare equal.
bool scenario_equivalent(const Scenario& a, const Scenario& b);

/// Rewrites the system so the noise term sigma dB becomes the deterministic
/// drift sigma dt (the literal opinion-model variant): diffusion becomes 0
/// and each species' potential gradient absorbs -sigma.
SystemSpec apply_noise_as_drift(const SystemSpec& spec);

}  // namespace rbm

#endif  // RBMSIM_SCENARIOS_HPP
