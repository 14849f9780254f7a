// Copyright 2026 The ZMS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dynamics.hpp"

namespace zms {

enum class Sampler { gauss_hermite, monte_carlo };
enum class Summation { coherent, incoherent };

/// Local field of sub-sample i is mean + delta_i * inhom_axis, delta_i ~ Normal(0, sigma^2).
struct MagneticEnvironment {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();       ///< gauss
  Eigen::Vector3d inhom_axis = Eigen::Vector3d::UnitX();
  double sigma = 0.0;                                   ///< gauss
  Sampler sampler = Sampler::gauss_hermite;
  int n_samples = 21;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FieldSample {
  Eigen::Vector3d b;
  double weight = 0.0;
};

/// Nodes and weights of the n-point rule for E[f(X)], X ~ Normal(0, 1). Weights sum to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite_normal(int n);

std::vector<FieldSample> sample_fields(const MagneticEnvironment& env);

struct EnsembleResult {
  std::vector<RetrievedTrace> traces;  ///< one per storage time, in input order
  std::vector<FieldSample> samples;
};

struct EnsembleOptions {
  Summation summation = Summation::coherent;
  int max_threads = 0;  ///< 0: hardware concurrency, further capped by ZMS_THREADS
};

/// Worker count after applying the ZMS_THREADS cap.
int resolve_thread_count(int requested);

/// Incoherent mode sums weighted intensities; its amplitude holds the coherent sum for reference.
EnsembleResult run_ensemble(const LevelScheme& scheme, const PulseSequence& sequence, const MagneticEnvironment& env,
                            const std::vector<double>& storage_times, const IntegratorConfig& integrator,
                            const UnitSystem& units, const EnsembleOptions& options = {});

}  // namespace zms
