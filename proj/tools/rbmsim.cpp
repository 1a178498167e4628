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

#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "rbm/analysis.hpp"
#include "rbm/dynamics.hpp"
#include "rbm/io.hpp"
#include "rbm/parallel.hpp"
#include "rbm/scenarios.hpp"

namespace {

using namespace rbm;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitBlowUp = 2;
constexpr int kExitInconsistent = 3;

struct CommonArgs {
  std::string preset_name;
  std::string config_path;
  std::string output = "out";
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int replicas = 0;
  int workers = 0;
  bool force = false;
  bool lenient = false;
  double tau = 0.0;
  bool tau_set = false;
  double end_time = 0.0;
  bool end_time_set = false;
  std::vector<Index> counts;
  std::vector<Index> batch_sizes;
  bool noise_as_drift = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  auto* p = cmd->add_option("--preset", a.preset_name,
                            "named scenario (see list-presets)");
  auto* c = cmd->add_option("--config", a.config_path,
                            "path to a scenario config file");
  p->excludes(c);
  c->excludes(p);
  cmd->add_option("--output,-o", a.output, "output directory")
      ->capture_default_str();
  cmd->add_option("--format", a.format, "report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "master seed (derives every stream)")
      ->each([&a](const std::string&) { a.seed_set = true; });
  cmd->add_option("--replicas", a.replicas, "number of independent replicas");
  cmd->add_option("--workers", a.workers,
                  "worker threads (0 = RBM_WORKERS or hardware)");
  cmd->add_flag("--force", a.force,
                "allow overriding pinned preset parameters");
  cmd->add_flag("--lenient", a.lenient,
                "downgrade unknown config keys to warnings");
  cmd->add_option("--tau", a.tau, "time step override")
      ->each([&a](const std::string&) { a.tau_set = true; });
  cmd->add_option("--end-time", a.end_time, "end time override")
      ->each([&a](const std::string&) { a.end_time_set = true; });
  cmd->add_option("--counts", a.counts, "per-species particle counts override")
      ->delimiter(',');
  cmd->add_option("--batch-sizes", a.batch_sizes,
                  "per-species batch sizes override")
      ->delimiter(',');
  cmd->add_flag("--noise-as-drift", a.noise_as_drift,
                "replace sigma dB by the literal sigma dt drift");
}

bool is_test3_variant(const std::vector<Index>& counts) {
  for (const auto& v : test3_count_variants()) {
    if (v == counts) return true;
  }
  return false;
}

Scenario resolve_scenario(const CommonArgs& a) {
  Scenario sc;
  bool from_preset = false;
  if (!a.preset_name.empty()) {
    sc = preset(a.preset_name);
    from_preset = true;
  } else if (!a.config_path.empty()) {
    std::vector<std::string> warnings;
    sc = load_config(read_file(a.config_path), a.lenient, &warnings);
    for (const auto& w : warnings) {
      std::cerr << "warning: " << a.config_path << ": " << w << "\n";
    }
  } else {
    throw ConfigError("exactly one of --preset or --config is required");
  }

  if (!a.counts.empty()) {
    if (static_cast<Index>(a.counts.size()) != sc.system.species_count()) {
      throw ConfigError("--counts needs one value per species");
    }
    if (from_preset && !a.force &&
        !(sc.name == "test3" && is_test3_variant(a.counts))) {
      throw ConfigError(
          "--counts on this preset is pinned (only the published test3 "
          "sizes are free); pass --force to override");
    }
    for (Index i = 0; i < sc.system.species_count(); ++i) {
      sc.system.species[i].particle_count = a.counts[i];
    }
  }
  if (!a.batch_sizes.empty()) {
    if (static_cast<Index>(a.batch_sizes.size()) !=
        sc.system.species_count()) {
      throw ConfigError("--batch-sizes needs one value per species");
    }
    if (from_preset && !a.force) {
      throw ConfigError("--batch-sizes on a preset requires --force");
    }
    for (Index i = 0; i < sc.system.species_count(); ++i) {
      sc.system.species[i].batch_size = a.batch_sizes[i];
    }
  }
  if (a.tau_set) {
    if (a.tau <= 0.0) throw ConfigError("time step tau must be positive");
    if (from_preset && !a.force) {
      throw ConfigError("--tau on a preset requires --force");
    }
    sc.system.tau = a.tau;
  }
  if (a.end_time_set) {
    if (a.end_time <= 0.0) throw ConfigError("end time T must be positive");
    if (from_preset && !a.force) {
      throw ConfigError("--end-time on a preset requires --force");
    }
    sc.system.end_time = a.end_time;
  }
  if (a.replicas > 0) sc.run.replicas = a.replicas;
  if (a.seed_set) sc.run.seed = a.seed;
  if (a.noise_as_drift) sc.run.noise_as_drift = true;

  const auto diags = validate_system(sc.system);
  if (has_errors(diags)) {
    std::string msg = "invalid scenario";
    for (const auto& d : diags) {
      if (d.severity == Diagnostic::Severity::Error) {
        msg += "\n  - " + d.message;
      }
    }
    throw ConfigError(msg);
  }
  for (const auto& d : diags) {
    if (d.severity == Diagnostic::Severity::Warning) {
      std::cerr << "warning: " << d.message << "\n";
    }
  }
  return sc;
}

int cmd_simulate(const CommonArgs& a, bool full, int bins,
                 const std::vector<double>& hist_range,
                 const std::vector<double>& record_times) {
  const Scenario sc = resolve_scenario(a);
  SystemSpec spec = sc.system;
  if (sc.run.noise_as_drift) spec = apply_noise_as_drift(spec);
  const int replicas = std::max(1, sc.run.replicas);

  RunOptions opts;
  opts.record_times =
      record_times.empty() ? sc.run.record_times : record_times;

  const auto start = std::chrono::steady_clock::now();
  std::vector<Trajectory> runs(replicas);
  parallel_for_index(replicas, a.workers, [&](int r) {
    const std::uint64_t replica_seed =
        derive_stream_seed(sc.run.seed, static_cast<std::uint64_t>(r));
    runs[r] = full ? run_full(spec, replica_seed, opts)
                   : run_rbm(spec, replica_seed, opts);
  });
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  const bool with_replica = replicas > 1;
  std::string csv = trajectory_csv_header(spec.dimension, with_replica);
  for (int r = 0; r < replicas; ++r) {
    append_trajectory_csv(csv, runs[r], r, with_replica);
  }
  write_file_atomic(a.output + "/trajectory.csv", csv);

  if (spec.dimension == 1) {
    double lo, hi;
    if (hist_range.size() == 2) {
      lo = hist_range[0];
      hi = hist_range[1];
    } else {
      lo = 1e300;
      hi = -1e300;
      for (const auto& run : runs) {
        for (const auto& m : run.states.back().positions) {
          lo = std::min(lo, m.minCoeff());
          hi = std::max(hi, m.maxCoeff());
        }
      }
      hi += 1e-9 * (hi - lo + 1.0);
    }
    std::vector<Histogram> hists;
    for (Index i = 0; i < spec.species_count(); ++i) {
      std::vector<double> samples;
      for (const auto& run : runs) {
        const PosMat& m = run.states.back().positions[i];
        samples.insert(samples.end(), m.data(), m.data() + m.rows());
      }
      hists.push_back(histogram(samples, bins, lo, hi));
    }
    write_file_atomic(a.output + "/histogram.csv", histograms_csv(hists));
  }

  if (a.format == "json") {
    write_file_atomic(a.output + "/scenario.json", scenario_to_json(sc));
    std::string tj;
    for (const auto& run : runs) tj += trajectory_json(run);
    write_file_atomic(a.output + "/trajectory.json", tj);
  }

  std::uint64_t evals = 0;
  for (const auto& run : runs) evals += run.kernel_evals;
  std::cout << "simulate " << sc.name << ": replicas=" << replicas
            << " steps=" << spec.steps() << " kernel_evals=" << evals
            << " wall_time_s=" << format_double(wall) << "\n";
  return kExitOk;
}

int cmd_converge(const CommonArgs& a, const std::vector<double>& tau_list,
                 int ref_refinement) {
  const Scenario sc = resolve_scenario(a);
  SystemSpec spec = sc.system;
  if (sc.run.noise_as_drift) spec = apply_noise_as_drift(spec);

  if (!tau_list.empty() && !a.preset_name.empty() && !a.force) {
    throw ConfigError("--tau-list on a preset requires --force");
  }
  CoupledOptions opts;
  opts.tau_list = tau_list.empty() ? sc.run.tau_list : tau_list;
  if (opts.tau_list.size() < 3) {
    throw ConfigError("need >= 3 step sizes for a convergence study");
  }
  opts.ref_refinement =
      ref_refinement >= 0 ? ref_refinement : sc.run.ref_refinement;
  opts.replicas = std::max(1, sc.run.replicas);
  opts.seed = sc.run.seed;
  opts.workers = a.workers;

  const auto series = run_coupled(spec, opts);
  write_file_atomic(a.output + "/errors.csv", error_series_csv(series));
  write_file_atomic(a.output + "/errors.json", error_series_json(series));
  if (series.slope_valid) {
    std::cout << "converge " << sc.name
              << ": slope=" << format_double(series.slope)
              << " intercept=" << format_double(series.intercept)
              << " replicas=" << series.replicas << "\n";
  } else {
    std::cout << "converge " << sc.name
              << ": slope fit skipped (zero or too few usable errors)\n";
  }
  return kExitOk;
}

int cmd_consistency(const CommonArgs& a, const std::vector<Index>& counts,
                    const std::vector<Index>& batches, Index dim,
                    std::int64_t mc_samples, std::uint64_t cap,
                    bool legacy_beta) {
  SystemSpec spec;
  std::string label;
  if (!counts.empty()) {
    if (counts.size() != batches.size()) {
      throw ConfigError(
          "--micro-counts and --micro-batches must have the same length");
    }
    spec.dimension = dim;
    spec.end_time = 1.0;
    spec.tau = 0.5;
    const double charges[] = {-1.0, 2.0, -2.0, 1.0, -1.5, 2.5};
    const Index n = static_cast<Index>(counts.size());
    for (Index i = 0; i < n; ++i) {
      SpeciesSpec s;
      s.particle_count = counts[i];
      s.batch_size = batches[i];
      s.diffusion = DiffusionSpec::additive(0.5);
      s.potential = PotentialSpec::none();
      s.init = InitialDistribution::gaussian_centered(2.0, dim);
      spec.species.push_back(std::move(s));
    }
    spec.kernels.resize(n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        spec.kernels[i].push_back(
            KernelSpec::scaled_cauchy(charges[i % 6], charges[j % 6]));
      }
    }
    throw_if_invalid(spec, "invalid --micro-counts/--micro-batches");
    label = "micro";
  } else {
    const Scenario sc = resolve_scenario(a);
    spec = sc.system;
    label = sc.name;
  }

  const std::uint64_t seed = a.seed_set ? a.seed : 1;
  RngStream rng(derive_stream_seed(seed, 0));
  std::vector<PosMat> positions;
  for (const auto& s : spec.species) {
    PosMat m(s.particle_count, spec.dimension);
    for (Index k = 0; k < m.rows(); ++k) {
      for (Index t = 0; t < m.cols(); ++t) m(k, t) = 2.0 * rng.normal();
    }
    positions.push_back(std::move(m));
  }

  const bool monte_carlo = mc_samples > 0 || enumeration_count(spec) > cap;
  if (monte_carlo && mc_samples <= 0) {
    throw ConfigError(
        "configuration too large to enumerate (" +
        std::to_string(enumeration_count(spec)) +
        " joint partitions); pass --mc <samples> for Monte-Carlo mode");
  }
  if (monte_carlo && legacy_beta) {
    throw ConfigError("--legacy-beta needs the enumeration mode");
  }

  const auto report = consistency_report(spec, positions, monte_carlo,
                                         mc_samples, cap, seed, legacy_beta);
  write_file_atomic(a.output + "/consistency.json",
                    consistency_report_json(report));

  std::cout << "consistency " << label << " (" << report.mode
            << "): max|E chi|=" << format_double(report.max_mean_norm)
            << " max_var_discrepancy="
            << format_double(report.max_variance_discrepancy)
            << " theta=" << format_double(report.constants.theta) << " -> "
            << (report.consistent ? "CONSISTENT" : "MISMATCH") << "\n";
  return report.consistent ? kExitOk : kExitInconsistent;
}

int cmd_cost(const CommonArgs& a) {
  const Scenario sc = resolve_scenario(a);
  const SystemSpec& spec = sc.system;
  RngStream rng(sc.run.seed);
  const Partition part = sample_partition(spec, rng);
  const auto report = kernel_eval_counts(spec, part);
  if (a.format == "json") {
    write_file_atomic(a.output + "/cost.json", cost_report_json(report));
  } else {
    write_file_atomic(a.output + "/cost.csv", cost_report_csv(report));
  }
  std::cout << "cost " << sc.name
            << ": full/step=" << report.full_kernel_evals_per_step
            << " rbm/step=" << report.rbm_kernel_evals_per_step
            << " ratio=" << format_double(report.eval_ratio) << "\n";
  return kExitOk;
}

int cmd_list_presets() {
  for (const auto& name : preset_names()) {
    const auto sc = preset(name);
    std::cout << name << ": n=" << sc.system.species_count()
              << " d=" << sc.system.dimension
              << " T=" << format_double(sc.system.end_time)
              << " tau=" << format_double(sc.system.tau) << " N=(";
    for (Index i = 0; i < sc.system.species_count(); ++i) {
      if (i) std::cout << ",";
      std::cout << sc.system.species[i].particle_count;
    }
    std::cout << ")\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rbmsim: multi-species interacting-particle simulation with the "
      "random-batch method"};
  app.require_subcommand(1);

  CommonArgs sim_args, conv_args, cons_args, cost_args;

  auto* sim = app.add_subcommand(
      "simulate", "run the batch (or full) dynamics and write trajectories");
  add_common(sim, sim_args);
  bool sim_full = false;
  int sim_bins = 100;
  std::vector<double> sim_hist_range, sim_record;
  sim->add_flag("--full", sim_full, "full pairwise dynamics instead of RBM");
  sim->add_option("--bins", sim_bins, "histogram bins (d = 1 output)")
      ->capture_default_str();
  sim->add_option("--hist-range", sim_hist_range,
                  "histogram range lo,hi (default: data range)")
      ->delimiter(',')
      ->expected(2);
  sim->add_option("--record", sim_record, "snapshot times")->delimiter(',');

  auto* conv = app.add_subcommand(
      "converge", "coupled strong-error study over a list of step sizes");
  add_common(conv, conv_args);
  std::vector<double> conv_tau_list;
  int conv_ref = -1;
  conv->add_option("--tau-list", conv_tau_list, "step sizes to compare")
      ->delimiter(',');
  conv->add_option("--ref-refinement", conv_ref, "reference step = tau / 2^s");

  auto* cons = app.add_subcommand(
      "consistency",
      "verify the remainder's mean and variance against the closed form");
  add_common(cons, cons_args);
  std::vector<Index> cons_counts, cons_batches;
  Index cons_dim = 2;
  std::int64_t cons_mc = 0;
  std::uint64_t cons_cap = 1000000;
  bool cons_legacy = false;
  cons->add_option("--micro-counts", cons_counts,
                   "small built-in system: particle counts")
      ->delimiter(',');
  cons->add_option("--micro-batches", cons_batches,
                   "small built-in system: batch sizes")
      ->delimiter(',');
  cons->add_option("--dim", cons_dim, "dimension of the built-in system")
      ->capture_default_str();
  cons->add_option("--mc", cons_mc,
                   "Monte-Carlo samples (0 = exhaustive enumeration)");
  cons->add_option("--cap", cons_cap, "enumeration cap")
      ->capture_default_str();
  cons->add_flag(
      "--legacy-beta", cons_legacy,
      "[experimental test hook] drop the multi-species batch-count "
      "correction from beta; demonstrates the resulting inconsistency");

  auto* cost = app.add_subcommand(
      "cost", "exact kernel-evaluation counts, full vs random-batch");
  add_common(cost, cost_args);

  app.add_subcommand("list-presets", "list the shipped scenarios");

  try {
    app.parse(argc, argv);
    if (sim->parsed()) {
      return cmd_simulate(sim_args, sim_full, sim_bins, sim_hist_range,
                          sim_record);
    }
    if (conv->parsed()) {
      return cmd_converge(conv_args, conv_tau_list, conv_ref);
    }
    if (cons->parsed()) {
      return cmd_consistency(cons_args, cons_counts, cons_batches, cons_dim,
                             cons_mc, cons_cap, cons_legacy);
    }
    if (cost->parsed()) return cmd_cost(cost_args);
    return cmd_list_presets();
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const BlowUpError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBlowUp;
  } catch (const EnumerationTooLargeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitConfig;
  }
}
