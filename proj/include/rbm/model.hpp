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

#ifndef RBMSIM_MODEL_HPP
#define RBMSIM_MODEL_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rbm/common.hpp"

namespace rbm {

// Pairwise interaction kernel K_ij : R^d -> R^d. Built-in forms carry
// pre-derived sup-norm and Lipschitz constants; custom callables may declare
// them or leave them unset (in which case assumption checks skip the pair).
//
// Forms:
//   Zero         K(x) = 0
//   ScaledCauchy K(x) = q_i q_j x / (1 + |x|^2)
//   BumpGradient K(x) = -grad B^eta(x),  B^eta(x) = eta^{-1} B(x/eta),
//                B(x) = strength * exp(1 - 1/(1 - |x|^2)) on |x| < 1.
//                The sign makes a positive strength repulsive, which is the
//                segregating direction of the population model.
//   Opinion      K(x) = -strength * phi(x/radius) x,
//                phi(y) = exp(1 - 1/(1 - |y|^10)) on |y| < 1
//                (bounded-confidence attraction with radius of the
//                influencing species).
struct KernelSpec {
  enum class Form { Zero, ScaledCauchy, BumpGradient, Opinion, Custom };

  Form form = Form::Zero;
  double q_i = 0.0, q_j = 0.0;   // ScaledCauchy factors
  double strength = 0.0;         // BumpGradient / Opinion D_ij
  double eta = 1.0;              // BumpGradient support radius
  double radius = 1.0;           // Opinion support radius R_j
  std::function<void(const Vec&, Vec&)> custom;

  // Declared bounds; never computed symbolically. Built-in factories fill
  // them from closed forms (ScaledCauchy) or pre-derived numeric suprema.
  std::optional<double> sup_norm;
  std::optional<double> lipschitz;

  static KernelSpec zero();
  static KernelSpec scaled_cauchy(double q_i, double q_j);
  static KernelSpec bump_gradient(double strength, double eta);
  static KernelSpec opinion(double strength, double radius);
  static KernelSpec make_custom(std::function<void(const Vec&, Vec&)> fn,
                                std::optional<double> sup_norm = std::nullopt,
                                std::optional<double> lipschitz = std::nullopt);

  bool is_zero() const { return form == Form::Zero; }
};

// Confining potential; only the gradient enters the dynamics.
struct PotentialSpec {
  enum class Form { None, QuadraticWell, Custom };

  Form form = Form::None;
  double convexity_r = 0.0;  // declared strong-convexity constant r_i
  Vec well_center;           // QuadraticWell minimum m_i
  double growth_q = 0.0;     // declared polynomial growth exponent q_i
  std::function<void(const Vec&, Vec&)> custom_grad;

  static PotentialSpec none();
  static PotentialSpec quadratic_well(double r, Vec center);
  static PotentialSpec make_custom(std::function<void(const Vec&, Vec&)> grad,
                                   double convexity_r, double growth_q);
};

struct DiffusionSpec {
  enum class Form { Additive, Multiplicative };

  Form form = Form::Additive;
  double sigma = 0.0;  // additive constant
  std::function<double(const Vec&)> sigma_fn;
  double lipschitz = 0.0;  // declared constants for the multiplicative form
  double bound = 0.0;

  static DiffusionSpec additive(double sigma);
  static DiffusionSpec multiplicative(std::function<double(const Vec&)> fn,
                                      double lipschitz, double bound);

  bool is_additive() const { return form == Form::Additive; }
};

struct GaussianInit {
  Vec mean;
  double variance = 1.0;
};
struct UniformInit {
  double lo = 0.0, hi = 1.0;
};
struct PointCloudInit {
  Mat points;  // rows are sampled-from positions (cycled if fewer than N)
};

struct InitialDistribution {
  enum class Kind { Gaussian, Uniform, PointCloud };
  Kind kind = Kind::Gaussian;
  GaussianInit gaussian;
  UniformInit uniform;
  PointCloudInit cloud;

  static InitialDistribution gaussian_centered(double variance, Index dim);
  static InitialDistribution gaussian_at(Vec mean, double variance);
  static InitialDistribution uniform_box(double lo, double hi);
  static InitialDistribution point_cloud(Mat points);
};

struct SpeciesSpec {
  Index particle_count = 0;  // N_i
  Index batch_size = 0;      // p_i, >= 2 and dividing N_i
  DiffusionSpec diffusion;
  PotentialSpec potential;
  InitialDistribution init;

  Index batch_count() const { return particle_count / batch_size; }  // b_i
};

// Full problem definition. kernels[i][j] couples species i (affected) to
// species j (acting); both indices are 0-based internally.
struct SystemSpec {
  Index dimension = 1;
  std::vector<SpeciesSpec> species;
  std::vector<std::vector<KernelSpec>> kernels;
  double end_time = 1.0;  // T
  double tau = 0.1;       // step

  Index species_count() const { return static_cast<Index>(species.size()); }
  Index total_particles() const;
  int steps() const { return step_count(end_time, tau); }
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity;
  std::string message;
};

/// Evaluates K_ij(x) into `out` (resized to the system dimension).
/// Non-finite input raises ConfigError.
void eval_kernel(const SystemSpec& spec, Index i, Index j, const Vec& x,
                 Vec& out);
Vec eval_kernel(const SystemSpec& spec, Index i, Index j, const Vec& x);

void eval_potential_grad(const PotentialSpec& potential, const Vec& x,
                         Vec& out);
Vec eval_potential_grad(const PotentialSpec& potential, const Vec& x);

/// sigma_i for the additive form, sigma_i(x) for the multiplicative one.
/// A negative value from a custom callable raises ConfigError.
double eval_diffusion(const DiffusionSpec& diffusion, const Vec& x);

/// Structural violations (p_i not dividing N_i, p_i < 2, tau <= 0, ragged
/// kernel matrix, ...) come back as errors; violated assumption inequalities
/// (strong convexity vs declared Lipschitz constants) as warnings, since the
/// simulator still runs outside the theorem's hypotheses. Pure: equal specs
/// give equal diagnostics.
std::vector<Diagnostic> validate_system(const SystemSpec& spec);

/// Throws ConfigError listing every error-severity diagnostic, if any.
void throw_if_invalid(const SystemSpec& spec,
                      const std::string& context = "");

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Diagnostic::Severity::Error) return true;
  return false;
}

}  // namespace rbm

#endif  // RBMSIM_MODEL_HPP
