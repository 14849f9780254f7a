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

#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "atomic_structure.hpp"

namespace zms {

using DensityMatrix = Eigen::MatrixXcd;

/// Bridges SI/gauss I/O and the internal units, where time is measured in 1/Gamma
/// and frequencies in units of Gamma.
struct UnitSystem {
  double mu_b_over_h = 1.399624e6;  ///< Hz per gauss
  double gamma_hz = 5.2e6;          ///< Gamma / 2pi

  [[nodiscard]] double gamma_rad() const { return 2.0 * std::numbers::pi * gamma_hz; }
  [[nodiscard]] double to_gamma_time(double seconds) const { return seconds * gamma_rad(); }
  [[nodiscard]] double to_seconds(double gamma_time) const { return gamma_time / gamma_rad(); }
  /// g mu_B B / hbar in units of Gamma, per gauss.
  [[nodiscard]] double zeeman_per_gauss(double g_factor) const {
    return g_factor * mu_b_over_h / gamma_hz;
  }
  void validate() const;
};

struct LarmorFrequency {
  double angular = 0.0;  ///< |Omega_L|, rad/s
  double period = std::numeric_limits<double>::infinity();  ///< seconds
  [[nodiscard]] double hz() const { return angular / (2.0 * std::numbers::pi); }
};

LarmorFrequency larmor_frequency(double g_factor, double b_magnitude_gauss, const UnitSystem& units);

struct OpticalField {
  double rabi = 0.0;  ///< reduced Rabi frequency, units of Gamma
  SphericalPolarization polarization;
  double phase = 0.0;
  double detuning = 0.0;  ///< units of Gamma
};

struct FieldSegment {
  double duration = 0.0;  ///< seconds
  std::vector<OpticalField> optical_fields;
  Eigen::Vector3d b_field = Eigen::Vector3d::Zero();  ///< gauss
};

struct PulseSequence {
  FieldSegment write;  ///< W and W' together
  FieldSegment dark;   ///< duration is the storage time
  FieldSegment read;   ///< R
  SphericalPolarization detect_polarization;

  void validate() const;
};

struct IntegratorConfig {
  double dt = 0.005;                                       ///< RK4 step, units of 1/Gamma
  double sample_interval = 0.05 * 2.0 * std::numbers::pi;  ///< read sampling, units of 1/Gamma
  bool exact_dark = true;  ///< closed-form dark propagator instead of RK4 during storage

  [[nodiscard]] int sample_stride() const;
  void validate() const;
};

struct RetrievedTrace {
  double storage_time = 0.0;          ///< seconds
  std::vector<double> times;          ///< seconds since the read field turned on
  std::vector<Complex> amplitude;
  std::vector<double> intensity;
};

/// Rotating-frame Hamiltonian of one homogeneous sub-sample, in units of Gamma.
Operator build_hamiltonian(const LevelScheme& scheme, const FieldSegment& segment, const UnitSystem& units);

/// Ground -> excited raising operator for polarization q, embedded in the full N x N space.
Operator raising_operator(const LevelScheme& scheme, int q);

/// scheme.gamma in units of the time unit's Gamma (1 unless a test overrides it).
double relative_decay(const LevelScheme& scheme, const UnitSystem& units);

/// Lindblad right-hand side (units of Gamma) with spontaneous decay through the three
/// polarization channels. No ground relaxation.
Operator lindblad_derivative(const LevelScheme& scheme, const Operator& hamiltonian, const DensityMatrix& rho,
                             const UnitSystem& units);

/// Component of the optical coherence radiating with polarization `pol`.
Complex projected_coherence(const LevelScheme& scheme, const DensityMatrix& rho, const SphericalPolarization& pol);

/// Row functional r with projected_coherence(rho) == r * vec(rho) (column-major vec).
Eigen::RowVectorXcd coherence_probe(const LevelScheme& scheme, const SphericalPolarization& pol);

/// Column-major vectorized Lindblad generator: d vec(rho)/dt = L vec(rho).
Eigen::MatrixXcd liouvillian(const LevelScheme& scheme, const Operator& hamiltonian, const UnitSystem& units);

/// Classical RK4 for a segment with a time-independent generator. Because the generator is
/// linear and constant, one RK4 step is the fixed matrix sum_{k<=4} (hL)^k / k!, precomputed once.
class SegmentPropagator {
 public:
  SegmentPropagator(const LevelScheme& scheme, const Operator& hamiltonian, double dt, const UnitSystem& units);

  struct Samples {
    std::vector<double> times;  ///< offsets from segment start, units of 1/Gamma
    std::vector<Complex> values;
  };

  /// Advances rho through `duration` (1/Gamma units). The last partial step is shortened to
  /// land on the segment end. With stride > 0 the probe is evaluated at step 0 and every
  /// `stride` full steps after it.
  DensityMatrix propagate(const DensityMatrix& rho, double duration, int stride = 0,
                          const Eigen::RowVectorXcd* probe = nullptr, Samples* samples = nullptr) const;

  [[nodiscard]] double dt() const { return dt_; }

 private:
  int dim_;
  double dt_;
  Eigen::MatrixXcd generator_;
  Eigen::MatrixXcd step_;
};

struct PropagationResult {
  DensityMatrix rho;
  std::vector<Complex> samples;
};

/// One-shot wrapper around SegmentPropagator; dt and sample stride as in IntegratorConfig.
PropagationResult propagate_segment(const LevelScheme& scheme, const DensityMatrix& rho,
                                    const FieldSegment& segment, double dt, int sample_stride,
                                    const SphericalPolarization& detect, const UnitSystem& units);

/// Exact evolution with all optical fields off: unitary Zeeman precession in each manifold,
/// exponential decay of excited populations and optical coherences, and the decay feed into
/// the ground manifold integrated in closed form.
class DarkPropagator {
 public:
  DarkPropagator(const LevelScheme& scheme, const Eigen::Vector3d& b_field, const UnitSystem& units,
                 double detuning = 0.0);

  /// t in units of 1/Gamma.
  [[nodiscard]] DensityMatrix apply(const DensityMatrix& rho, double t) const;

 private:
  int ng_;
  int ne_;
  double decay_;
  Eigen::MatrixXcd ground_basis_;
  Eigen::MatrixXcd excited_basis_;
  Eigen::VectorXd ground_energy_;
  Eigen::VectorXd excited_energy_;
  std::vector<Eigen::MatrixXcd> decay_channels_;  ///< Ng x Ne lowering blocks in the eigenbases
};

/// Uniform incoherent mixture over the ground sublevels.
DensityMatrix initial_ground_mixture(const LevelScheme& scheme);

/// Runs write / dark / read for one sub-sample. The write state is computed once on
/// construction and reused for every storage time.
class StorageRun {
 public:
  StorageRun(const LevelScheme& scheme, const PulseSequence& sequence, const Eigen::Vector3d& b_actual,
             const IntegratorConfig& integrator, const UnitSystem& units);

  [[nodiscard]] const DensityMatrix& written_state() const { return written_; }
  [[nodiscard]] RetrievedTrace retrieve(double storage_time_seconds) const;
  /// State at read turn-on, i.e. after the dark interval.
  [[nodiscard]] DensityMatrix stored_state(double storage_time_seconds) const;

 private:
  LevelScheme scheme_;
  PulseSequence sequence_;
  IntegratorConfig integrator_;
  UnitSystem units_;
  DensityMatrix written_;
  DarkPropagator dark_;
  SegmentPropagator dark_rk4_;
  SegmentPropagator read_;
  Eigen::RowVectorXcd probe_;
};

RetrievedTrace run_storage_sequence(const LevelScheme& scheme, const PulseSequence& sequence,
                                    const Eigen::Vector3d& b_actual, const IntegratorConfig& integrator,
                                    const UnitSystem& units);

/// Diagnostics used by the invariant checks.
double trace_error(const DensityMatrix& rho);
double hermiticity_error(const DensityMatrix& rho);
double min_eigenvalue(const DensityMatrix& rho);

}  // namespace zms
