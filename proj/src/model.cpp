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

#include "rbm/model.hpp"

#include <cmath>
#include <sstream>

namespace rbm {

namespace {

// Numeric suprema of the kernel profiles, pre-derived once (see the
// declared-constants tests for the cross-checks):
//   sup_y |d/dy exp(1-1/(1-y^2))|            = 2.17035708571034  (y ~ 0.7598)
//   sup_y |d^2/dy^2 exp(1-1/(1-y^2))|        = 21.0658821189240  (y ~ 0.8951)
//   sup_y |phi(y) y|, phi = exp(1-1/(1-y^10)) = 0.712199755572753 (y ~ 0.7805)
//   sup_y |d/dy (phi(y) y)|                  = 8.20564574932003  (y ~ 0.9540)
constexpr double kBumpGradSup = 2.17035708571034;
constexpr double kBumpHessSup = 21.0658821189240;
constexpr double kOpinionProfileSup = 0.712199755572753;
constexpr double kOpinionSlopeSup = 8.20564574932003;

// Support boundary guard: inside the bump, 1/(1-|y|^2) overflows as |y|->1;
// the true kernel value there is far below machine epsilon.
constexpr double kSupportGuard = 1.0 - 1e-12;

void require_finite(const Vec& x, const char* what) {
  if (!x.allFinite()) {
    throw ConfigError(std::string(what) + ": non-finite input vector");
  }
}

}  // namespace

KernelSpec KernelSpec::zero() {
  KernelSpec k;
  k.form = Form::Zero;
  k.sup_norm = 0.0;
  k.lipschitz = 0.0;
  return k;
}

KernelSpec KernelSpec::scaled_cauchy(double q_i, double q_j) {
  KernelSpec k;
  k.form = Form::ScaledCauchy;
  k.q_i = q_i;
  k.q_j = q_j;
  // |c| x/(1+|x|^2) peaks at |x| = 1; the Jacobian norm peaks at x = 0.
  k.sup_norm = std::abs(q_i * q_j) / 2.0;
  k.lipschitz = std::abs(q_i * q_j);
  return k;
}

KernelSpec KernelSpec::bump_gradient(double strength, double eta) {
  if (eta <= 0.0) throw ConfigError("bump_gradient: eta must be positive");
  KernelSpec k;
  k.form = Form::BumpGradient;
  k.strength = strength;
  k.eta = eta;
  k.sup_norm = std::abs(strength) * kBumpGradSup / (eta * eta);
  k.lipschitz = std::abs(strength) * kBumpHessSup / (eta * eta * eta);
  return k;
}

KernelSpec KernelSpec::opinion(double strength, double radius) {
  if (radius <= 0.0) throw ConfigError("opinion: radius must be positive");
  KernelSpec k;
  k.form = Form::Opinion;
  k.strength = strength;
  k.radius = radius;
  k.sup_norm = std::abs(strength) * radius * kOpinionProfileSup;
  k.lipschitz = std::abs(strength) * kOpinionSlopeSup;
  return k;
}

KernelSpec KernelSpec::make_custom(std::function<void(const Vec&, Vec&)> fn,
                                   std::optional<double> sup_norm,
                                   std::optional<double> lipschitz) {
  KernelSpec k;
  k.form = Form::Custom;
  k.custom = std::move(fn);
  k.sup_norm = sup_norm;
  k.lipschitz = lipschitz;
  return k;
}

PotentialSpec PotentialSpec::none() {
  PotentialSpec p;
  p.form = Form::None;
  p.convexity_r = 0.0;
  p.growth_q = 0.0;
  return p;
}

PotentialSpec PotentialSpec::quadratic_well(double r, Vec center) {
  PotentialSpec p;
  p.form = Form::QuadraticWell;
  p.convexity_r = r;
  p.well_center = std::move(center);
  p.growth_q = 1.0;
  return p;
}

PotentialSpec PotentialSpec::make_custom(
    std::function<void(const Vec&, Vec&)> grad, double convexity_r,
    double growth_q) {
  PotentialSpec p;
  p.form = Form::Custom;
  p.custom_grad = std::move(grad);
  p.convexity_r = convexity_r;
  p.growth_q = growth_q;
  return p;
}

DiffusionSpec DiffusionSpec::additive(double sigma) {
  if (sigma < 0.0) throw ConfigError("diffusion: sigma must be >= 0");
  DiffusionSpec d;
  d.form = Form::Additive;
  d.sigma = sigma;
  d.bound = sigma;
  return d;
}

DiffusionSpec DiffusionSpec::multiplicative(
    std::function<double(const Vec&)> fn, double lipschitz, double bound) {
  DiffusionSpec d;
  d.form = Form::Multiplicative;
  d.sigma_fn = std::move(fn);
  d.lipschitz = lipschitz;
  d.bound = bound;
  return d;
}

InitialDistribution InitialDistribution::gaussian_centered(double variance,
                                                           Index dim) {
  InitialDistribution i;
  i.kind = Kind::Gaussian;
  i.gaussian.mean = Vec::Zero(dim);
  i.gaussian.variance = variance;
  return i;
}

InitialDistribution InitialDistribution::gaussian_at(Vec mean,
                                                     double variance) {
  InitialDistribution i;
  i.kind = Kind::Gaussian;
  i.gaussian.mean = std::move(mean);
  i.gaussian.variance = variance;
  return i;
}

InitialDistribution InitialDistribution::uniform_box(double lo, double hi) {
  InitialDistribution i;
  i.kind = Kind::Uniform;
  i.uniform.lo = lo;
  i.uniform.hi = hi;
  return i;
}

InitialDistribution InitialDistribution::point_cloud(Mat points) {
  InitialDistribution i;
  i.kind = Kind::PointCloud;
  i.cloud.points = std::move(points);
  return i;
}

Index SystemSpec::total_particles() const {
  Index n = 0;
  for (const auto& s : species) n += s.particle_count;
  return n;
}

void eval_kernel(const SystemSpec& spec, Index i, Index j, const Vec& x,
                 Vec& out) {
  require_finite(x, "eval_kernel");
  const KernelSpec& k = spec.kernels.at(i).at(j);
  switch (k.form) {
    case KernelSpec::Form::Zero:
      out = Vec::Zero(x.size());
      return;
    case KernelSpec::Form::ScaledCauchy: {
      const double c = k.q_i * k.q_j / (1.0 + x.squaredNorm());
      out = c * x;
      return;
    }
    case KernelSpec::Form::BumpGradient: {
      const double y2 = x.squaredNorm() / (k.eta * k.eta);
      if (y2 >= kSupportGuard * kSupportGuard) {
        out = Vec::Zero(x.size());
        return;
      }
      const double u = 1.0 - y2;
      // -grad of eta^{-1} B(x/eta): the chain rule gives eta^{-3} overall
      // since grad acts on x and B' carries another 1/(eta^2) through y = x/eta.
      const double c =
          k.strength * 2.0 / (k.eta * k.eta * k.eta) * std::exp(1.0 - 1.0 / u) / (u * u);
      out = c * x;
      return;
    }
    case KernelSpec::Form::Opinion: {
      const double y2 = x.squaredNorm() / (k.radius * k.radius);
      const double y10 = y2 * y2 * y2 * y2 * y2;
      if (y10 >= kSupportGuard) {
        out = Vec::Zero(x.size());
        return;
      }
      const double c = -k.strength * std::exp(1.0 - 1.0 / (1.0 - y10));
      out = c * x;
      return;
    }
    case KernelSpec::Form::Custom:
      k.custom(x, out);
      return;
  }
  out = Vec::Zero(x.size());
}

Vec eval_kernel(const SystemSpec& spec, Index i, Index j, const Vec& x) {
  Vec out;
  eval_kernel(spec, i, j, x, out);
  return out;
}

void eval_potential_grad(const PotentialSpec& potential, const Vec& x,
                         Vec& out) {
  require_finite(x, "eval_potential_grad");
  switch (potential.form) {
    case PotentialSpec::Form::None:
      out = Vec::Zero(x.size());
      return;
    case PotentialSpec::Form::QuadraticWell:
      out = potential.convexity_r * (x - potential.well_center);
      return;
    case PotentialSpec::Form::Custom:
      potential.custom_grad(x, out);
      return;
  }
}

Vec eval_potential_grad(const PotentialSpec& potential, const Vec& x) {
  Vec out;
  eval_potential_grad(potential, x, out);
  return out;
}

double eval_diffusion(const DiffusionSpec& diffusion, const Vec& x) {
  require_finite(x, "eval_diffusion");
  if (diffusion.is_additive()) return diffusion.sigma;
  const double s = diffusion.sigma_fn(x);
  if (s < 0.0) {
    throw ConfigError("eval_diffusion: custom sigma returned a negative value");
  }
  return s;
}

std::vector<Diagnostic> validate_system(const SystemSpec& spec) {
  std::vector<Diagnostic> diags;
  auto error = [&](const std::string& m) {
    diags.push_back({Diagnostic::Severity::Error, m});
  };
  auto warn = [&](const std::string& m) {
    diags.push_back({Diagnostic::Severity::Warning, m});
  };

  const Index n = spec.species_count();
  if (n == 0) error("system has no species");
  if (spec.dimension < 1) error("dimension must be >= 1");
  if (spec.tau <= 0.0) error("time step tau must be positive");
  if (spec.end_time <= 0.0) error("end time T must be positive");

  for (Index i = 0; i < n; ++i) {
    const auto& s = spec.species[i];
    const std::string who = "species " + std::to_string(i + 1);
    if (s.particle_count < 1) error(who + ": particle count must be positive");
    if (s.batch_size < 2) error(who + ": batch size must be >= 2");
    if (s.batch_size >= 2 && s.particle_count >= 1 &&
        s.particle_count % s.batch_size != 0) {
      error(who + ": batch size must divide particle count (" +
            std::to_string(s.batch_size) + " does not divide " +
            std::to_string(s.particle_count) + ")");
    }
    if (s.init.kind == InitialDistribution::Kind::Gaussian &&
        s.init.gaussian.variance < 0.0) {
      error(who + ": initial variance must be >= 0");
    }
    if (s.init.kind == InitialDistribution::Kind::Uniform &&
        !(s.init.uniform.lo <= s.init.uniform.hi)) {
      error(who + ": uniform initial range is empty");
    }
    if (s.init.kind == InitialDistribution::Kind::PointCloud &&
        s.init.cloud.points.rows() == 0) {
      error(who + ": point-cloud initial distribution is empty");
    }
    if (!s.diffusion.is_additive() && !s.diffusion.sigma_fn) {
      error(who + ": multiplicative diffusion without a callable");
    }
  }

  if (static_cast<Index>(spec.kernels.size()) != n) {
    error("kernel matrix must have one row per species");
  } else {
    for (Index i = 0; i < n; ++i) {
      if (static_cast<Index>(spec.kernels[i].size()) != n) {
        error("kernel matrix row " + std::to_string(i + 1) +
              " must have one entry per species");
      }
    }
  }
  if (has_errors(diags)) return diags;

  // Assumption (A3) / (B2): r_i > 2 sum_j max{L_ij, L_ji} (+ multiplicative
  // extras). Only checkable where constants are declared; custom kernels
  // without declared Lipschitz constants are skipped.
  for (Index i = 0; i < n; ++i) {
    double lip_sum = 0.0;
    bool known = true;
    for (Index j = 0; j < n; ++j) {
      const auto& kij = spec.kernels[i][j];
      const auto& kji = spec.kernels[j][i];
      if (!kij.lipschitz || !kji.lipschitz) {
        known = false;
        break;
      }
      lip_sum += std::max(*kij.lipschitz, *kji.lipschitz);
    }
    if (!known) continue;
    const auto& sp = spec.species[i];
    const double r = sp.potential.convexity_r;
    double required = 2.0 * lip_sum;
    const char* label = "(A3)";
    if (!sp.diffusion.is_additive()) {
      const double li = sp.diffusion.lipschitz;
      const double d = static_cast<double>(spec.dimension);
      const double qi = std::max(1.0, sp.potential.growth_q);
      required = std::max(required + li * li * d,
                          2.0 * li * li * (2.0 * qi + d - 2.0));
      label = "(B2)";
    }
    if (!(r > required)) {
      std::ostringstream os;
      os << "species " << (i + 1) << ": strong-convexity assumption " << label
         << " fails: r = " << r << " <= " << required
         << " (needed r > 2*sum_j max{L_ij, L_ji}"
         << (sp.diffusion.is_additive() ? "" : " plus diffusion terms") << ")";
      warn(os.str());
    }
  }
  return diags;
}

void throw_if_invalid(const SystemSpec& spec, const std::string& context) {
  auto diags = validate_system(spec);
  if (!has_errors(diags)) return;
  std::string msg = context.empty() ? "invalid system" : context;
  for (const auto& d : diags) {
    if (d.severity == Diagnostic::Severity::Error) msg += "\n  - " + d.message;
  }
  throw ConfigError(msg);
}

}  // namespace rbm
