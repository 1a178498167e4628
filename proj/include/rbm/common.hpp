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

#ifndef RBMSIM_COMMON_HPP
#define RBMSIM_COMMON_HPP

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rbm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Configuration or precondition violation (bad spec, bad CLI flags, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A simulated position became NaN/Inf. Carries enough context to locate
/// the offending particle and time step.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(int species, Index particle, double time, int step,
              const std::string& what)
      : std::runtime_error(what),
        species(species),
        particle(particle),
        time(time),
        step(step) {}
  int species;
  Index particle;
  double time;
  int step;
};

/// Raised when a joint partition enumeration would exceed the configured cap.
class EnumerationTooLargeError : public std::runtime_error {
 public:
  explicit EnumerationTooLargeError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Number of Euler-Maruyama steps covering [0, T] with step tau; robust
/// against T/tau landing a hair above an integer in floating point.
inline int step_count(double end_time, double tau) {
  double q = end_time / tau;
  double r = std::nearbyint(q);
  if (r >= 1.0 && std::abs(q - r) < 1e-9 * r) return static_cast<int>(r);
  return static_cast<int>(std::ceil(q));
}

}  // namespace rbm

#endif  // RBMSIM_COMMON_HPP
