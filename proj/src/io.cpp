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

#include "rbm/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rbm {

std::string format_double(double v) {
  char buf[64];
  // %.17g round-trips, but prefer the shortest representation that does.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw ConfigError("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string trajectory_csv_header(Index dimension, bool with_replica) {
  std::string h = with_replica ? "replica,time,species,particle"
                               : "time,species,particle";
  for (Index t = 0; t < dimension; ++t) {
    h += ",x_" + std::to_string(t + 1);
  }
  h += "\n";
  return h;
}

void append_trajectory_csv(std::string& out, const Trajectory& traj,
                           int replica, bool with_replica) {
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const ParticleState& state = traj.states[s];
    const std::string time = format_double(traj.times[s]);
    for (std::size_t i = 0; i < state.positions.size(); ++i) {
      const PosMat& m = state.positions[i];
      for (Index k = 0; k < m.rows(); ++k) {
        if (with_replica) {
          out += std::to_string(replica);
          out += ',';
        }
        out += time;
        out += ',';
        out += std::to_string(i + 1);
        out += ',';
        out += std::to_string(k + 1);
        for (Index t = 0; t < m.cols(); ++t) {
          out += ',';
          out += format_double(m(k, t));
        }
        out += '\n';
      }
    }
  }
}

std::string trajectory_json(const Trajectory& traj) {
  nlohmann::json j;
  j["method"] = traj.method;
  j["seed"] = traj.seed;
  j["spec_hash"] = traj.spec_hash;
  j["kernel_evals"] = traj.kernel_evals;
  j["times"] = traj.times;
  j["snapshots"] = nlohmann::json::array();
  for (const auto& state : traj.states) {
    nlohmann::json snap = nlohmann::json::array();
    for (const auto& m : state.positions) {
      std::vector<std::vector<double>> rows;
      rows.reserve(m.rows());
      for (Index k = 0; k < m.rows(); ++k) {
        rows.emplace_back(m.data() + k * m.cols(),
                          m.data() + (k + 1) * m.cols());
      }
      snap.push_back(rows);
    }
    j["snapshots"].push_back(snap);
  }
  return j.dump() + "\n";
}

std::string error_series_csv(const ErrorSeries& series) {
  std::string out = "tau,mean_error,std_error\n";
  for (std::size_t t = 0; t < series.taus.size(); ++t) {
    out += format_double(series.taus[t]) + "," +
           format_double(series.mean_errors[t]) + "," +
           format_double(series.std_errors[t]) + "\n";
  }
  return out;
}

std::string error_series_json(const ErrorSeries& series) {
  nlohmann::json j;
  j["taus"] = series.taus;
  j["mean_errors"] = series.mean_errors;
  j["std_errors"] = series.std_errors;
  j["replicas"] = series.replicas;
  j["seed"] = series.seed;
  j["slope_valid"] = series.slope_valid;
  if (series.slope_valid) {
    j["slope"] = series.slope;
    j["intercept"] = series.intercept;
    j["residual"] = series.residual;
  }
  return j.dump(2) + "\n";
}

std::string histograms_csv(const std::vector<Histogram>& per_species) {
  std::string out = "species,bin_lo,bin_hi,density\n";
  for (std::size_t i = 0; i < per_species.size(); ++i) {
    const Histogram& h = per_species[i];
    const double w = h.bin_width();
    for (std::size_t b = 0; b < h.density.size(); ++b) {
      out += std::to_string(i + 1) + "," +
             format_double(h.lo + w * static_cast<double>(b)) + "," +
             format_double(h.lo + w * static_cast<double>(b + 1)) + "," +
             format_double(h.density[b]) + "\n";
    }
  }
  return out;
}

std::string cost_report_json(const CostReport& r) {
  nlohmann::json j;
  j["full_kernel_evals_per_step"] = r.full_kernel_evals_per_step;
  j["rbm_kernel_evals_per_step"] = r.rbm_kernel_evals_per_step;
  j["full_arith_ops_per_step"] = r.full_arith_ops_per_step;
  j["rbm_arith_ops_per_step"] = r.rbm_arith_ops_per_step;
  j["steps"] = r.steps;
  j["full_kernel_evals_total"] = r.full_kernel_evals_total;
  j["rbm_kernel_evals_total"] = r.rbm_kernel_evals_total;
  j["eval_ratio"] = r.eval_ratio;
  return j.dump(2) + "\n";
}

std::string cost_report_csv(const CostReport& r) {
  std::string out = "metric,full,rbm\n";
  out += "kernel_evals_per_step," +
         std::to_string(r.full_kernel_evals_per_step) + "," +
         std::to_string(r.rbm_kernel_evals_per_step) + "\n";
  out += "arith_ops_per_step," + format_double(r.full_arith_ops_per_step) +
         "," + format_double(r.rbm_arith_ops_per_step) + "\n";
  out += "kernel_evals_total," + std::to_string(r.full_kernel_evals_total) +
         "," + std::to_string(r.rbm_kernel_evals_total) + "\n";
  out += "eval_ratio," + format_double(1.0) + "," +
         format_double(r.eval_ratio) + "\n";
  return out;
}

std::string consistency_report_json(const ConsistencyReport& rep) {
  nlohmann::json j;
  j["mode"] = rep.mode;
  j["consistent"] = rep.consistent;
  j["max_mean_norm"] = rep.max_mean_norm;
  j["max_variance_discrepancy"] = rep.max_variance_discrepancy;
  j["theta"] = rep.constants.theta;
  j["gamma_exponent"] = rep.constants.gamma_exponent;
  j["gamma_factors"] = std::vector<double>(
      rep.constants.gamma_factors.data(),
      rep.constants.gamma_factors.data() + rep.constants.gamma_factors.size());
  if (rep.constants.variance_bound_known) {
    j["variance_bound"] = rep.constants.variance_bound;
  }
  j["entries"] = nlohmann::json::array();
  for (const auto& e : rep.entries) {
    nlohmann::json je;
    je["species"] = e.species;
    je["particle"] = e.particle + 1;
    je["closed_form_variance"] = e.closed_form_variance;
    nlohmann::json terms;
    terms["a_same"] = e.closed_form.a_same;
    terms["a_pair"] = std::vector<double>(
        e.closed_form.a_pair.data(),
        e.closed_form.a_pair.data() + e.closed_form.a_pair.size());
    terms["a_diag"] = std::vector<double>(
        e.closed_form.a_diag.data(),
        e.closed_form.a_diag.data() + e.closed_form.a_diag.size());
    std::vector<std::vector<double>> cross;
    for (Index r = 0; r < e.closed_form.a_cross.rows(); ++r) {
      cross.emplace_back(e.closed_form.a_cross.row(r).begin(),
                         e.closed_form.a_cross.row(r).end());
    }
    terms["a_cross"] = cross;
    je["a_terms"] = terms;
    if (e.has_exact) {
      je["exact"] = {
          {"mean_norm", e.exact.mean.norm()},
          {"variance", e.exact.variance},
          {"partitions", e.exact.partition_count}};
    }
    if (e.has_monte_carlo) {
      je["monte_carlo"] = {{"mean_norm", e.monte_carlo.mean.norm()},
                           {"variance", e.monte_carlo.variance},
                           {"mean_se", e.monte_carlo.mean_se},
                           {"variance_se", e.monte_carlo.variance_se},
                           {"samples", e.monte_carlo.samples}};
    }
    j["entries"].push_back(je);
  }
  return j.dump(2) + "\n";
}

}  // namespace rbm
