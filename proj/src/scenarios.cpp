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

#include "rbm/scenarios.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rbm/io.hpp"

namespace rbm {

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Scenario make_test3(const std::vector<Index>& counts) {
  Scenario sc;
  sc.name = "test3";
  SystemSpec& sys = sc.system;
  sys.dimension = 2;
  sys.end_time = 1.0;
  sys.tau = 0.25;

  const double q[3] = {-1.0, 2.0, -2.0};
  const double r[3] = {1.0, 4.0, 2.0};
  const Vec centers[3] = {vec2(1.0, 0.0), vec2(-1.0, -1.0), vec2(1.0, 1.0)};
  const double variances[3] = {2.0, 2.0, 1.0};

  for (int i = 0; i < 3; ++i) {
    SpeciesSpec s;
    s.particle_count = counts[i];
    s.batch_size = 2;
    s.diffusion = DiffusionSpec::additive(0.5);
    s.potential = PotentialSpec::quadratic_well(r[i], centers[i]);
    s.init = InitialDistribution::gaussian_centered(variances[i], 2);
    sys.species.push_back(std::move(s));
  }
  sys.kernels.resize(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      sys.kernels[i].push_back(KernelSpec::scaled_cauchy(q[i], q[j]));
    }
  }

  sc.run.tau_list = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
  sc.run.ref_refinement = 2;
  sc.run.replicas = 10;
  sc.run.seed = 1;
  sc.notes = {
      "error experiment: reference solution at step tau/2^2, i.e. 2^-4..2^-8 "
      "for tau = 2^-2..2^-6",
      "flops experiment variant: sigma = 0, n = 2, tau = 2^-3..2^-7, "
      "N = (1250,1250)/(2500,2500)/(5000,5000), explicit-Euler reference at "
      "step sizes 2^-1..2^-5"};
  sc.acceptance_checks = {"strong-rate", "degeneracy", "cost"};
  return sc;
}

Scenario make_population3() {
  Scenario sc;
  sc.name = "population3";
  SystemSpec& sys = sc.system;
  sys.dimension = 1;
  sys.end_time = 2.0;
  sys.tau = 1e-2;

  const double sigma[3] = {1.0, 2.0, 3.0};
  const double means[3] = {-1.0, 2.0, 3.0};
  const double D[3][3] = {{0.0, 355.0, 355.0}, {25.0, 0.0, 25.0},
                          {355.0, 0.0, 0.0}};
  for (int i = 0; i < 3; ++i) {
    SpeciesSpec s;
    s.particle_count = 5000;
    s.batch_size = 20;
    s.diffusion = DiffusionSpec::additive(sigma[i]);
    s.potential = PotentialSpec::none();
    Vec m(1);
    m << means[i];
    s.init = InitialDistribution::gaussian_at(m, 2.0);
    sys.species.push_back(std::move(s));
  }
  sys.kernels.resize(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      sys.kernels[i].push_back(
          D[i][j] == 0.0 ? KernelSpec::zero()
                         : KernelSpec::bump_gradient(D[i][j], 2.0));
    }
  }
  sc.run.replicas = 200;
  sc.run.seed = 1;
  sc.acceptance_checks = {"segregation", "cost-ratio"};
  return sc;
}

Scenario make_opinion(bool submissive) {
  Scenario sc;
  sc.name = submissive ? "opinion_submissive" : "opinion_obedient";
  SystemSpec& sys = sc.system;
  sys.dimension = 1;
  sys.end_time = 5.0;
  sys.tau = 1e-5;

  const Index counts[3] = {5000, 10, 2};
  const Index batch[3] = {20, 2, 2};
  const double radius[3] = {1.0, 2.5, 5.0};
  const double d23 = submissive ? 25.0 : 1.0;
  const double D[3][3] = {{5.0, 10.0, 0.0}, {0.0, 0.0, d23},
                          {0.0, 0.0, 0.1}};
  for (int i = 0; i < 3; ++i) {
    SpeciesSpec s;
    s.particle_count = counts[i];
    s.batch_size = batch[i];
    s.diffusion = DiffusionSpec::additive(0.1);
    s.potential = PotentialSpec::none();
    s.init = InitialDistribution::uniform_box(0.0, 10.0);
    sys.species.push_back(std::move(s));
  }
  sys.kernels.resize(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      sys.kernels[i].push_back(
          D[i][j] == 0.0 ? KernelSpec::zero()
                         : KernelSpec::opinion(D[i][j], radius[j]));
    }
  }
  sc.run.replicas = 1;
  sc.run.seed = 1;
  sc.notes = {
      "hierarchy rules (CEOs only influenced by CEOs, managers only by CEOs, "
      "workers by workers and managers) are encoded purely through the zero "
      "pattern of the influence matrix",
      "the source model writes the noise term as a deterministic sigma dt; "
      "the default here is sigma dB, with run.noise_as_drift reproducing the "
      "literal variant"};
  sc.acceptance_checks = {submissive ? "clustering" : "consensus"};
  return sc;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "test3", "population3", "opinion_submissive", "opinion_obedient"};
  return names;
}

const std::vector<std::vector<Index>>& test3_count_variants() {
  static const std::vector<std::vector<Index>> variants = {
      {100, 100, 200}, {1000, 1000, 2000}, {2500, 2500, 5000}};
  return variants;
}

Scenario preset(const std::string& name) {
  if (name == "test3") return make_test3(test3_count_variants().front());
  if (name == "population3") return make_population3();
  if (name == "opinion_submissive") return make_opinion(true);
  if (name == "opinion_obedient") return make_opinion(false);
  throw ConfigError("unknown preset '" + name +
                    "'; available: test3, population3, opinion_submissive, "
                    "opinion_obedient");
}

SystemSpec apply_noise_as_drift(const SystemSpec& spec) {
  SystemSpec out = spec;
  for (auto& s : out.species) {
    if (!s.diffusion.is_additive()) {
      throw ConfigError("noise_as_drift requires additive diffusion");
    }
    const double sigma = s.diffusion.sigma;
    const PotentialSpec old = s.potential;
    s.potential = PotentialSpec::make_custom(
        [old, sigma](const Vec& x, Vec& out_grad) {
          eval_potential_grad(old, x, out_grad);
          out_grad.array() -= sigma;  // -grad V picks up +sigma
        },
        old.convexity_r, old.growth_q);
    s.diffusion = DiffusionSpec::additive(0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config grammar
// ---------------------------------------------------------------------------

namespace {

struct ConfigLine {
  int number = 0;
  std::string section;
  std::string key;
  std::string value;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const ConfigLine& l) {
  try {
    std::size_t used = 0;
    const double v = std::stod(l.value, &used);
    if (used != l.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    parse_fail(l.number, "expected a number for '" + l.key + "', got '" +
                             l.value + "'");
  }
}

std::int64_t parse_int(const ConfigLine& l) {
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(l.value, &used);
    if (used != l.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    parse_fail(l.number, "expected an integer for '" + l.key + "', got '" +
                             l.value + "'");
  }
}

bool parse_bool(const ConfigLine& l) {
  if (l.value == "true" || l.value == "1") return true;
  if (l.value == "false" || l.value == "0") return false;
  parse_fail(l.number, "expected true/false for '" + l.key + "'");
}

std::vector<double> parse_double_list(const ConfigLine& l) {
  std::vector<double> out;
  std::stringstream ss(l.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) parse_fail(l.number, "empty list element");
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      parse_fail(l.number, "expected numbers for '" + l.key + "'");
    }
  }
  if (out.empty()) parse_fail(l.number, "empty list for '" + l.key + "'");
  return out;
}

Vec parse_vec(const ConfigLine& l, Index dim) {
  const auto values = parse_double_list(l);
  if (static_cast<Index>(values.size()) != dim) {
    parse_fail(l.number, "'" + l.key + "' needs " + std::to_string(dim) +
                             " components");
  }
  Vec v(dim);
  for (Index t = 0; t < dim; ++t) v[t] = values[t];
  return v;
}

}  // namespace

Scenario load_config(const std::string& text, bool lenient,
                     std::vector<std::string>* warnings) {
  std::vector<ConfigLine> lines;
  {
    std::stringstream ss(text);
    std::string raw;
    std::string section;
    int number = 0;
    while (std::getline(ss, raw)) {
      ++number;
      const std::size_t hash = raw.find('#');
      if (hash != std::string::npos) raw = raw.substr(0, hash);
      const std::string line = trim(raw);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') parse_fail(number, "unterminated section");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) parse_fail(number, "empty section name");
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        parse_fail(number, "expected 'key = value'");
      }
      ConfigLine cl;
      cl.number = number;
      cl.section = section;
      cl.key = trim(line.substr(0, eq));
      cl.value = trim(line.substr(eq + 1));
      if (cl.key.empty()) parse_fail(number, "empty key");
      if (cl.section.empty()) parse_fail(number, "key before any section");
      lines.push_back(std::move(cl));
    }
  }

  auto unknown = [&](const ConfigLine& l) {
    const std::string msg = "unknown key '" + l.key + "' in [" + l.section +
                            "] (line " + std::to_string(l.number) + ")";
    if (!lenient) throw ConfigError("config: " + msg);
    if (warnings) warnings->push_back(msg);
  };

  Scenario sc;
  sc.name = "config";
  SystemSpec& sys = sc.system;
  sys.dimension = 1;
  Index species_count = 0;

  // Pass 1: [system].
  for (const auto& l : lines) {
    if (l.section != "system") continue;
    if (l.key == "dimension") sys.dimension = parse_int(l);
    else if (l.key == "species") species_count = parse_int(l);
    else if (l.key == "end_time") sys.end_time = parse_double(l);
    else if (l.key == "tau") sys.tau = parse_double(l);
    else if (l.key == "name") sc.name = l.value;
    else unknown(l);
  }
  if (species_count < 1) {
    throw ConfigError("config: [system] must declare species >= 1");
  }
  sys.species.resize(species_count);
  sys.kernels.assign(species_count,
                     std::vector<KernelSpec>(species_count, KernelSpec::zero()));
  for (auto& s : sys.species) {
    s.init = InitialDistribution::gaussian_centered(1.0, sys.dimension);
    s.diffusion = DiffusionSpec::additive(0.0);
    s.potential = PotentialSpec::none();
  }

  // Pass 2: species sections, collected per index so dependent keys
  // (potential parameters, init parameters) can be resolved together.
  for (Index i = 0; i < species_count; ++i) {
    const std::string section = "species." + std::to_string(i + 1);
    SpeciesSpec& s = sys.species[i];
    std::string potential_form = "none";
    double well_strength = 0.0;
    Vec well_center = Vec::Zero(sys.dimension);
    double growth_q = -1.0;
    std::string init_form = "gaussian";
    Vec init_mean = Vec::Zero(sys.dimension);
    double init_variance = 1.0;
    double init_lo = 0.0, init_hi = 1.0;
    for (const auto& l : lines) {
      if (l.section != section) continue;
      if (l.key == "count") s.particle_count = parse_int(l);
      else if (l.key == "batch_size") s.batch_size = parse_int(l);
      else if (l.key == "sigma") s.diffusion = DiffusionSpec::additive(parse_double(l));
      else if (l.key == "potential") potential_form = l.value;
      else if (l.key == "well_strength") well_strength = parse_double(l);
      else if (l.key == "well_center") well_center = parse_vec(l, sys.dimension);
      else if (l.key == "growth_q") growth_q = parse_double(l);
      else if (l.key == "init") init_form = l.value;
      else if (l.key == "init_mean") init_mean = parse_vec(l, sys.dimension);
      else if (l.key == "init_variance") init_variance = parse_double(l);
      else if (l.key == "init_lo") init_lo = parse_double(l);
      else if (l.key == "init_hi") init_hi = parse_double(l);
      else unknown(l);
    }
    if (potential_form == "none") {
      s.potential = PotentialSpec::none();
    } else if (potential_form == "quadratic_well") {
      s.potential = PotentialSpec::quadratic_well(well_strength, well_center);
    } else {
      throw ConfigError("config: [" + section + "] unknown potential '" +
                        potential_form + "'");
    }
    if (growth_q >= 0.0) s.potential.growth_q = growth_q;
    if (init_form == "gaussian") {
      s.init = InitialDistribution::gaussian_at(init_mean, init_variance);
    } else if (init_form == "uniform") {
      s.init = InitialDistribution::uniform_box(init_lo, init_hi);
    } else {
      throw ConfigError("config: [" + section + "] unknown init '" +
                        init_form + "'");
    }
  }

  // Pass 3: kernels.
  for (Index i = 0; i < species_count; ++i) {
    for (Index j = 0; j < species_count; ++j) {
      const std::string section =
          "kernel." + std::to_string(i + 1) + "." + std::to_string(j + 1);
      std::string form;
      double q_i = 0.0, q_j = 0.0, strength = 0.0, eta = 1.0, radius = 1.0;
      bool seen = false;
      for (const auto& l : lines) {
        if (l.section != section) continue;
        seen = true;
        if (l.key == "form") form = l.value;
        else if (l.key == "q_i") q_i = parse_double(l);
        else if (l.key == "q_j") q_j = parse_double(l);
        else if (l.key == "strength") strength = parse_double(l);
        else if (l.key == "eta") eta = parse_double(l);
        else if (l.key == "radius") radius = parse_double(l);
        else unknown(l);
      }
      if (!seen) continue;
      if (form == "zero") sys.kernels[i][j] = KernelSpec::zero();
      else if (form == "scaled_cauchy")
        sys.kernels[i][j] = KernelSpec::scaled_cauchy(q_i, q_j);
      else if (form == "bump_gradient")
        sys.kernels[i][j] = KernelSpec::bump_gradient(strength, eta);
      else if (form == "opinion")
        sys.kernels[i][j] = KernelSpec::opinion(strength, radius);
      else
        throw ConfigError("config: [" + section + "] unknown kernel form '" +
                          form + "'");
    }
  }

  // Pass 4: sections that belong to no known family are unknown.
  for (const auto& l : lines) {
    if (l.section == "system" || l.section == "run") continue;
    bool known = false;
    for (Index i = 1; i <= species_count && !known; ++i) {
      if (l.section == "species." + std::to_string(i)) known = true;
      for (Index j = 1; j <= species_count && !known; ++j) {
        if (l.section ==
            "kernel." + std::to_string(i) + "." + std::to_string(j)) {
          known = true;
        }
      }
    }
    if (!known) {
      const std::string msg = "unknown section [" + l.section + "] (line " +
                              std::to_string(l.number) + ")";
      if (!lenient) throw ConfigError("config: " + msg);
      if (warnings) warnings->push_back(msg);
    }
  }

  // Pass 5: [run].
  for (const auto& l : lines) {
    if (l.section != "run") continue;
    if (l.key == "replicas") sc.run.replicas = static_cast<int>(parse_int(l));
    else if (l.key == "seed") sc.run.seed = static_cast<std::uint64_t>(parse_int(l));
    else if (l.key == "tau_list") sc.run.tau_list = parse_double_list(l);
    else if (l.key == "record_times") sc.run.record_times = parse_double_list(l);
    else if (l.key == "ref_refinement") sc.run.ref_refinement = static_cast<int>(parse_int(l));
    else if (l.key == "noise_as_drift") sc.run.noise_as_drift = parse_bool(l);
    else unknown(l);
  }

  auto diags = validate_system(sys);
  if (has_errors(diags)) {
    std::string msg = "config: invalid system";
    for (const auto& d : diags) {
      if (d.severity == Diagnostic::Severity::Error) msg += "\n  - " + d.message;
    }
    throw ConfigError(msg);
  }
  if (warnings) {
    for (const auto& d : diags) {
      if (d.severity == Diagnostic::Severity::Warning) {
        warnings->push_back(d.message);
      }
    }
  }
  return sc;
}

namespace {

void append_kv(std::string& out, const std::string& key, const std::string& v) {
  out += key + " = " + v + "\n";
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (t) s += ", ";
    s += format_double(xs[t]);
  }
  return s;
}

std::string fmt_vec(const Vec& v) {
  std::string s;
  for (Index t = 0; t < v.size(); ++t) {
    if (t) s += ", ";
    s += format_double(v[t]);
  }
  return s;
}

}  // namespace

std::string serialize_config(const Scenario& sc) {
  const SystemSpec& sys = sc.system;
  std::string out;
  out += "[system]\n";
  append_kv(out, "name", sc.name);
  append_kv(out, "dimension", std::to_string(sys.dimension));
  append_kv(out, "species", std::to_string(sys.species_count()));
  append_kv(out, "end_time", format_double(sys.end_time));
  append_kv(out, "tau", format_double(sys.tau));
  for (Index i = 0; i < sys.species_count(); ++i) {
    const SpeciesSpec& s = sys.species[i];
    out += "\n[species." + std::to_string(i + 1) + "]\n";
    append_kv(out, "count", std::to_string(s.particle_count));
    append_kv(out, "batch_size", std::to_string(s.batch_size));
    if (!s.diffusion.is_additive()) {
      throw ConfigError("serialize_config: multiplicative diffusion is not "
                        "config-expressible");
    }
    append_kv(out, "sigma", format_double(s.diffusion.sigma));
    switch (s.potential.form) {
      case PotentialSpec::Form::None:
        append_kv(out, "potential", "none");
        break;
      case PotentialSpec::Form::QuadraticWell:
        append_kv(out, "potential", "quadratic_well");
        append_kv(out, "well_strength", format_double(s.potential.convexity_r));
        append_kv(out, "well_center", fmt_vec(s.potential.well_center));
        break;
      case PotentialSpec::Form::Custom:
        throw ConfigError(
            "serialize_config: custom potential is not config-expressible");
    }
    if (s.potential.growth_q != 0.0 &&
        !(s.potential.form == PotentialSpec::Form::QuadraticWell &&
          s.potential.growth_q == 1.0)) {
      append_kv(out, "growth_q", format_double(s.potential.growth_q));
    }
    switch (s.init.kind) {
      case InitialDistribution::Kind::Gaussian:
        append_kv(out, "init", "gaussian");
        append_kv(out, "init_mean", fmt_vec(s.init.gaussian.mean));
        append_kv(out, "init_variance", format_double(s.init.gaussian.variance));
        break;
      case InitialDistribution::Kind::Uniform:
        append_kv(out, "init", "uniform");
        append_kv(out, "init_lo", format_double(s.init.uniform.lo));
        append_kv(out, "init_hi", format_double(s.init.uniform.hi));
        break;
      case InitialDistribution::Kind::PointCloud:
        throw ConfigError(
            "serialize_config: point-cloud init is not config-expressible");
    }
  }
  for (Index i = 0; i < sys.species_count(); ++i) {
    for (Index j = 0; j < sys.species_count(); ++j) {
      const KernelSpec& k = sys.kernels[i][j];
      if (k.is_zero()) continue;
      out += "\n[kernel." + std::to_string(i + 1) + "." +
             std::to_string(j + 1) + "]\n";
      switch (k.form) {
        case KernelSpec::Form::ScaledCauchy:
          append_kv(out, "form", "scaled_cauchy");
          append_kv(out, "q_i", format_double(k.q_i));
          append_kv(out, "q_j", format_double(k.q_j));
          break;
        case KernelSpec::Form::BumpGradient:
          append_kv(out, "form", "bump_gradient");
          append_kv(out, "strength", format_double(k.strength));
          append_kv(out, "eta", format_double(k.eta));
          break;
        case KernelSpec::Form::Opinion:
          append_kv(out, "form", "opinion");
          append_kv(out, "strength", format_double(k.strength));
          append_kv(out, "radius", format_double(k.radius));
          break;
        case KernelSpec::Form::Custom:
          throw ConfigError(
              "serialize_config: custom kernel is not config-expressible");
        case KernelSpec::Form::Zero:
          break;
      }
    }
  }
  out += "\n[run]\n";
  append_kv(out, "replicas", std::to_string(sc.run.replicas));
  append_kv(out, "seed", std::to_string(sc.run.seed));
  if (!sc.run.tau_list.empty()) {
    append_kv(out, "tau_list", fmt_list(sc.run.tau_list));
  }
  if (!sc.run.record_times.empty()) {
    append_kv(out, "record_times", fmt_list(sc.run.record_times));
  }
  append_kv(out, "ref_refinement", std::to_string(sc.run.ref_refinement));
  if (sc.run.noise_as_drift) append_kv(out, "noise_as_drift", "true");
  return out;
}

namespace {

bool kernel_equivalent(const KernelSpec& a, const KernelSpec& b) {
  if (a.form != b.form) return false;
  switch (a.form) {
    case KernelSpec::Form::Zero:
      return true;
    case KernelSpec::Form::ScaledCauchy:
      return a.q_i == b.q_i && a.q_j == b.q_j;
    case KernelSpec::Form::BumpGradient:
      return a.strength == b.strength && a.eta == b.eta;
    case KernelSpec::Form::Opinion:
      return a.strength == b.strength && a.radius == b.radius;
    case KernelSpec::Form::Custom:
      return false;
  }
  return false;
}

bool species_equivalent(const SpeciesSpec& a, const SpeciesSpec& b) {
  if (a.particle_count != b.particle_count || a.batch_size != b.batch_size) {
    return false;
  }
  if (a.diffusion.form != b.diffusion.form) return false;
  if (a.diffusion.is_additive() && a.diffusion.sigma != b.diffusion.sigma) {
    return false;
  }
  if (!a.diffusion.is_additive()) return false;  // callables: not comparable
  if (a.potential.form != b.potential.form) return false;
  if (a.potential.form == PotentialSpec::Form::Custom) return false;
  if (a.potential.form == PotentialSpec::Form::QuadraticWell &&
      (a.potential.convexity_r != b.potential.convexity_r ||
       a.potential.well_center != b.potential.well_center)) {
    return false;
  }
  if (a.potential.growth_q != b.potential.growth_q) return false;
  if (a.init.kind != b.init.kind) return false;
  switch (a.init.kind) {
    case InitialDistribution::Kind::Gaussian:
      return a.init.gaussian.mean == b.init.gaussian.mean &&
             a.init.gaussian.variance == b.init.gaussian.variance;
    case InitialDistribution::Kind::Uniform:
      return a.init.uniform.lo == b.init.uniform.lo &&
             a.init.uniform.hi == b.init.uniform.hi;
    case InitialDistribution::Kind::PointCloud:
      return a.init.cloud.points == b.init.cloud.points;
  }
  return false;
}

}  // namespace

bool scenario_equivalent(const Scenario& a, const Scenario& b) {
  if (a.name != b.name) return false;
  const SystemSpec& x = a.system;
  const SystemSpec& y = b.system;
  if (x.dimension != y.dimension || x.end_time != y.end_time ||
      x.tau != y.tau || x.species_count() != y.species_count()) {
    return false;
  }
  for (Index i = 0; i < x.species_count(); ++i) {
    if (!species_equivalent(x.species[i], y.species[i])) return false;
    for (Index j = 0; j < x.species_count(); ++j) {
      if (!kernel_equivalent(x.kernels[i][j], y.kernels[i][j])) return false;
    }
  }
  return a.run.tau_list == b.run.tau_list &&
         a.run.replicas == b.run.replicas && a.run.seed == b.run.seed &&
         a.run.record_times == b.run.record_times &&
         a.run.ref_refinement == b.run.ref_refinement &&
         a.run.noise_as_drift == b.run.noise_as_drift;
}

std::string scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  j["name"] = sc.name;
  j["dimension"] = sc.system.dimension;
  j["end_time"] = sc.system.end_time;
  j["tau"] = sc.system.tau;
  j["species"] = nlohmann::json::array();
  for (const auto& s : sc.system.species) {
    nlohmann::json js;
    js["count"] = s.particle_count;
    js["batch_size"] = s.batch_size;
    js["batches"] = s.batch_count();
    if (s.diffusion.is_additive()) {
      js["sigma"] = s.diffusion.sigma;
    } else {
      js["sigma"] = "multiplicative";
    }
    switch (s.potential.form) {
      case PotentialSpec::Form::None: js["potential"] = "none"; break;
      case PotentialSpec::Form::QuadraticWell: {
        js["potential"] = "quadratic_well";
        js["well_strength"] = s.potential.convexity_r;
        js["well_center"] = std::vector<double>(
            s.potential.well_center.data(),
            s.potential.well_center.data() + s.potential.well_center.size());
        break;
      }
      case PotentialSpec::Form::Custom: js["potential"] = "custom"; break;
    }
    j["species"].push_back(js);
  }
  j["kernels"] = nlohmann::json::array();
  for (const auto& row : sc.system.kernels) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& k : row) {
      nlohmann::json jk;
      switch (k.form) {
        case KernelSpec::Form::Zero: jk["form"] = "zero"; break;
        case KernelSpec::Form::ScaledCauchy:
          jk["form"] = "scaled_cauchy";
          jk["q_i"] = k.q_i;
          jk["q_j"] = k.q_j;
          break;
        case KernelSpec::Form::BumpGradient:
          jk["form"] = "bump_gradient";
          jk["strength"] = k.strength;
          jk["eta"] = k.eta;
          break;
        case KernelSpec::Form::Opinion:
          jk["form"] = "opinion";
          jk["strength"] = k.strength;
          jk["radius"] = k.radius;
          break;
        case KernelSpec::Form::Custom: jk["form"] = "custom"; break;
      }
      if (k.sup_norm) jk["sup_norm"] = *k.sup_norm;
      if (k.lipschitz) jk["lipschitz"] = *k.lipschitz;
      jr.push_back(jk);
    }
    j["kernels"].push_back(jr);
  }
  j["run"] = {{"replicas", sc.run.replicas},
              {"seed", sc.run.seed},
              {"tau_list", sc.run.tau_list},
              {"record_times", sc.run.record_times},
              {"ref_refinement", sc.run.ref_refinement},
              {"noise_as_drift", sc.run.noise_as_drift}};
  if (!sc.notes.empty()) j["notes"] = sc.notes;
  return j.dump(2);
}

}  // namespace rbm
