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

#include "dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace zms {

namespace {

const Complex kI(0.0, 1.0);

void check_finite_vector(const Eigen::VectorXcd& v, const char* where) {
  if (!v.allFinite()) throw NumericalError(std::string("non-finite density matrix during ") + where);
}

Operator zeeman_block(AngularMomentum f, double coefficient, const Eigen::Vector3d& b) {
  const auto ops = angular_momentum_matrices(f);
  return coefficient * (b.x() * ops.fx + b.y() * ops.fy + b.z() * ops.fz);
}

// Common detuning of all fields in a segment; fields must share the rotating frame.
double segment_detuning(const FieldSegment& segment) {
  if (segment.optical_fields.empty()) return 0.0;
  const double d = segment.optical_fields.front().detuning;
  for (const auto& f : segment.optical_fields)
    if (f.detuning != d) throw InvalidArgument("all optical fields of a segment must share one detuning");
  return d;
}

// (1 - exp(-z t)) / z, stable for small |z t|.
Complex decay_integral(Complex z, double t) {
  const Complex zt = z * t;
  if (std::abs(zt) < 1e-6) return t * (1.0 - 0.5 * zt + zt * zt / 6.0);
  return (1.0 - std::exp(-zt)) / z;
}

}  // namespace

void UnitSystem::validate() const {
  if (!(mu_b_over_h > 0.0) || !std::isfinite(mu_b_over_h)) throw ConfigError("units.mu_b_over_h", "must be positive");
  if (!(gamma_hz > 0.0) || !std::isfinite(gamma_hz)) throw ConfigError("units.gamma_hz", "must be positive");
}

LarmorFrequency larmor_frequency(double g_factor, double b_magnitude_gauss, const UnitSystem& units) {
  if (b_magnitude_gauss < 0.0) throw InvalidArgument("field magnitude must be non-negative");
  LarmorFrequency out;
  out.angular = std::abs(g_factor) * 2.0 * std::numbers::pi * units.mu_b_over_h * b_magnitude_gauss;
  if (out.angular > 0.0) out.period = 2.0 * std::numbers::pi / out.angular;
  return out;
}

void PulseSequence::validate() const {
  if (!(write.duration > 0.0)) throw ConfigError("sequence.write_us", "duration must be positive");
  if (!(read.duration > 0.0)) throw ConfigError("sequence.read_us", "duration must be positive");
  if (dark.duration < 0.0) throw ConfigError("sequence.storage_times_us", "storage time must be non-negative");
  if (write.optical_fields.empty()) throw ConfigError("sequence.write_fields", "write segment needs at least one optical field");
  if (read.optical_fields.empty()) throw ConfigError("sequence.read_fields", "read segment needs an optical field");
  if (!dark.optical_fields.empty()) throw ConfigError("sequence", "dark segment must not contain optical fields");
  for (const auto* seg : {&write, &read})
    for (const auto& f : seg->optical_fields) {
      if (!(f.rabi >= 0.0)) throw ConfigError("sequence.fields", "Rabi frequency must be non-negative");
      if (std::abs(f.polarization.norm() - 1.0) > 1e-9) throw ConfigError("sequence.fields", "polarization must be normalized");
    }
  if (std::abs(detect_polarization.norm() - 1.0) > 1e-9)
    throw ConfigError("sequence.detect", "polarization must be normalized");
}

int IntegratorConfig::sample_stride() const {
  return std::max(1, static_cast<int>(std::lround(sample_interval / dt)));
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("integrator.dt", "step must be positive");
  if (!(sample_interval > 0.0)) throw ConfigError("integrator.sample_interval", "must be positive");
}

Operator raising_operator(const LevelScheme& scheme, int q) {
  const int ng = scheme.ground_dim();
  Operator d = Operator::Zero(scheme.dim(), scheme.dim());
  d.block(ng, 0, scheme.excited_dim(), ng) = dipole_coupling(scheme, q).cast<Complex>();
  return d;
}

Operator build_hamiltonian(const LevelScheme& scheme, const FieldSegment& segment, const UnitSystem& units) {
  const int ng = scheme.ground_dim();
  const int ne = scheme.excited_dim();
  Operator h = Operator::Zero(scheme.dim(), scheme.dim());

  const double delta = segment_detuning(segment);
  h.block(ng, ng, ne, ne).diagonal().setConstant(-delta);
  h.block(0, 0, ng, ng) += zeeman_block(scheme.fg, units.zeeman_per_gauss(scheme.g_ground), segment.b_field);
  h.block(ng, ng, ne, ne) += zeeman_block(scheme.fe, units.zeeman_per_gauss(scheme.g_excited), segment.b_field);

  Eigen::MatrixXcd coupling = Eigen::MatrixXcd::Zero(ne, ng);
  for (int q = -1; q <= 1; ++q) {
    Complex drive(0.0);
    for (const auto& f : segment.optical_fields)
      drive += 0.5 * f.rabi * std::exp(kI * f.phase) * f.polarization.component(q);
    if (drive != 0.0) coupling += drive * dipole_coupling(scheme, q).cast<Complex>();
  }
  h.block(ng, 0, ne, ng) += coupling;
  h.block(0, ng, ng, ne) += coupling.adjoint();
  return h;
}

double relative_decay(const LevelScheme& scheme, const UnitSystem& units) {
  return scheme.gamma / units.gamma_rad();
}

Operator lindblad_derivative(const LevelScheme& scheme, const Operator& hamiltonian, const DensityMatrix& rho,
                             const UnitSystem& units) {
  if (hamiltonian.rows() != scheme.dim() || rho.rows() != scheme.dim() || rho.cols() != scheme.dim())
    throw InvalidArgument("operator dimensions do not match the level scheme");
  const double gamma = relative_decay(scheme, units);
  Operator out = -kI * (hamiltonian * rho - rho * hamiltonian);
  for (int q = -1; q <= 1; ++q) {
    const Operator a = raising_operator(scheme, q).adjoint();
    const Operator ada = a.adjoint() * a;
    out += gamma * (a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
  }
  return out;
}

Eigen::MatrixXcd liouvillian(const LevelScheme& scheme, const Operator& hamiltonian, const UnitSystem& units) {
  const int n = scheme.dim();
  if (hamiltonian.rows() != n || hamiltonian.cols() != n)
    throw InvalidArgument("Hamiltonian dimension does not match the level scheme");
  const double gamma = relative_decay(scheme, units);

  std::vector<Operator> jumps;
  Operator h_eff = hamiltonian;
  for (int q = -1; q <= 1; ++q) {
    jumps.push_back(raising_operator(scheme, q).adjoint());
    h_eff -= 0.5 * kI * gamma * jumps.back().adjoint() * jumps.back();
  }

  // vec(A X B) = (B^T kron A) vec(X) for column-major vec.
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(n * n, n * n);
  const Operator h_eff_conj = h_eff.conjugate();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Complex v(0.0);
          if (i == j) v += -kI * h_eff(k, l);
          if (k == l) v += kI * h_eff_conj(i, j);
          for (const auto& a : jumps) v += gamma * std::conj(a(i, j)) * a(k, l);
          gen(i * n + k, j * n + l) = v;
        }
  return gen;
}

Eigen::RowVectorXcd coherence_probe(const LevelScheme& scheme, const SphericalPolarization& pol) {
  const int n = scheme.dim();
  Operator m = Operator::Zero(n, n);
  for (int q = -1; q <= 1; ++q) m += std::conj(pol.component(q)) * raising_operator(scheme, q).adjoint();
  // sum_ij rho_ij m_ji = vec(m^T) . vec(rho)
  const Operator mt = m.transpose();
  return Eigen::Map<const Eigen::RowVectorXcd>(mt.data(), n * n);
}

Complex projected_coherence(const LevelScheme& scheme, const DensityMatrix& rho, const SphericalPolarization& pol) {
  Complex amp(0.0);
  for (int q = -1; q <= 1; ++q)
    amp += std::conj(pol.component(q)) * (rho * raising_operator(scheme, q).adjoint()).trace();
  return amp;
}

SegmentPropagator::SegmentPropagator(const LevelScheme& scheme, const Operator& hamiltonian, double dt,
                                     const UnitSystem& units)
    : dim_(scheme.dim()), dt_(dt), generator_(liouvillian(scheme, hamiltonian, units)) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("integration step must be positive");
  const auto m = dim_ * dim_;
  const Eigen::MatrixXcd hl = dt * generator_;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
  // Horner form of I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24.
  step_ = id + hl * (id + 0.5 * hl * (id + hl / 3.0 * (id + 0.25 * hl)));
}

DensityMatrix SegmentPropagator::propagate(const DensityMatrix& rho, double duration, int stride,
                                           const Eigen::RowVectorXcd* probe, Samples* samples) const {
  if (duration < 0.0) throw InvalidArgument("segment duration must be non-negative");
  if (rho.rows() != dim_ || rho.cols() != dim_) throw InvalidArgument("density matrix dimension mismatch");
  const bool sampling = stride > 0 && probe != nullptr && samples != nullptr;

  auto full_steps = static_cast<long>(std::floor(duration / dt_ + 1e-9));
  double remainder = duration - static_cast<double>(full_steps) * dt_;
  if (remainder < 1e-12 * std::max(1.0, duration)) remainder = 0.0;

  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), dim_ * dim_);
  Eigen::VectorXcd next(v.size());
  auto record = [&](long step) {
    check_finite_vector(v, "segment propagation");
    samples->times.push_back(static_cast<double>(step) * dt_);
    samples->values.push_back((*probe * v).value());
  };
  for (long k = 0; k < full_steps; ++k) {
    if (sampling && k % stride == 0) record(k);
    next.noalias() = step_ * v;
    v.swap(next);
  }
  if (sampling && full_steps % stride == 0) record(full_steps);
  if (remainder > 0.0) {
    const Eigen::MatrixXcd hl = remainder * generator_;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(hl.rows(), hl.cols());
    const Eigen::MatrixXcd partial = id + hl * (id + 0.5 * hl * (id + hl / 3.0 * (id + 0.25 * hl)));
    next.noalias() = partial * v;
    v.swap(next);
  }
  check_finite_vector(v, "segment propagation");
  return Eigen::Map<const DensityMatrix>(v.data(), dim_, dim_);
}

PropagationResult propagate_segment(const LevelScheme& scheme, const DensityMatrix& rho,
                                    const FieldSegment& segment, double dt, int sample_stride,
                                    const SphericalPolarization& detect, const UnitSystem& units) {
  const double duration = units.to_gamma_time(segment.duration);
  if (!(dt > 0.0)) throw InvalidArgument("integration step must be positive");
  if (dt > duration) throw InvalidArgument("integration step exceeds the segment duration");
  const SegmentPropagator prop(scheme, build_hamiltonian(scheme, segment, units), dt, units);
  const Eigen::RowVectorXcd probe = coherence_probe(scheme, detect);
  SegmentPropagator::Samples samples;
  PropagationResult out;
  out.rho = prop.propagate(rho, duration, sample_stride, &probe, &samples);
  out.samples = std::move(samples.values);
  return out;
}

DarkPropagator::DarkPropagator(const LevelScheme& scheme, const Eigen::Vector3d& b_field, const UnitSystem& units,
                               double detuning)
    : ng_(scheme.ground_dim()), ne_(scheme.excited_dim()), decay_(relative_decay(scheme, units)) {
  const Operator hg = zeeman_block(scheme.fg, units.zeeman_per_gauss(scheme.g_ground), b_field);
  Operator he = zeeman_block(scheme.fe, units.zeeman_per_gauss(scheme.g_excited), b_field);
  he.diagonal().array() -= detuning;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ground(hg);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> excited(he);
  ground_basis_ = ground.eigenvectors();
  ground_energy_ = ground.eigenvalues();
  excited_basis_ = excited.eigenvectors();
  excited_energy_ = excited.eigenvalues();

  for (int q = -1; q <= 1; ++q) {
    // lowering block (ground x excited) is the transpose of the real coupling matrix
    const Eigen::MatrixXcd lower = dipole_coupling(scheme, q).transpose().cast<Complex>();
    decay_channels_.push_back(ground_basis_.adjoint() * lower * excited_basis_);
  }
}

DensityMatrix DarkPropagator::apply(const DensityMatrix& rho, double t) const {
  if (t < 0.0) throw InvalidArgument("dark interval must be non-negative");
  if (rho.rows() != ng_ + ne_ || rho.cols() != ng_ + ne_) throw InvalidArgument("density matrix dimension mismatch");
  const double gamma = decay_;

  const Eigen::MatrixXcd gg = ground_basis_.adjoint() * rho.topLeftCorner(ng_, ng_) * ground_basis_;
  const Eigen::MatrixXcd ee = excited_basis_.adjoint() * rho.bottomRightCorner(ne_, ne_) * excited_basis_;
  const Eigen::MatrixXcd eg = excited_basis_.adjoint() * rho.bottomLeftCorner(ne_, ng_) * ground_basis_;

  Eigen::MatrixXcd gg_t(ng_, ng_);
  for (int a = 0; a < ng_; ++a)
    for (int b = 0; b < ng_; ++b) {
      const double omega_ab = ground_energy_(a) - ground_energy_(b);
      Complex feed(0.0);
      for (int c = 0; c < ne_; ++c)
        for (int d = 0; d < ne_; ++d) {
          if (ee(c, d) == 0.0) continue;
          Complex weight(0.0);
          for (const auto& chan : decay_channels_) weight += gamma * chan(a, c) * std::conj(chan(b, d));
          if (weight == 0.0) continue;
          const Complex z(gamma, excited_energy_(c) - excited_energy_(d) - omega_ab);
          feed += weight * ee(c, d) * decay_integral(z, t);
        }
      gg_t(a, b) = std::exp(-kI * omega_ab * t) * (gg(a, b) + feed);
    }

  Eigen::MatrixXcd ee_t(ne_, ne_);
  for (int c = 0; c < ne_; ++c)
    for (int d = 0; d < ne_; ++d)
      ee_t(c, d) = ee(c, d) * std::exp(Complex(-gamma * t, -(excited_energy_(c) - excited_energy_(d)) * t));

  Eigen::MatrixXcd eg_t(ne_, ng_);
  for (int c = 0; c < ne_; ++c)
    for (int a = 0; a < ng_; ++a)
      eg_t(c, a) = eg(c, a) * std::exp(Complex(-0.5 * gamma * t, -(excited_energy_(c) - ground_energy_(a)) * t));

  DensityMatrix out(ng_ + ne_, ng_ + ne_);
  out.topLeftCorner(ng_, ng_) = ground_basis_ * gg_t * ground_basis_.adjoint();
  out.bottomRightCorner(ne_, ne_) = excited_basis_ * ee_t * excited_basis_.adjoint();
  out.bottomLeftCorner(ne_, ng_) = excited_basis_ * eg_t * ground_basis_.adjoint();
  out.topRightCorner(ng_, ne_) = out.bottomLeftCorner(ne_, ng_).adjoint();
  return out;
}

DensityMatrix initial_ground_mixture(const LevelScheme& scheme) {
  DensityMatrix rho = DensityMatrix::Zero(scheme.dim(), scheme.dim());
  rho.topLeftCorner(scheme.ground_dim(), scheme.ground_dim()).diagonal().setConstant(1.0 / scheme.ground_dim());
  return rho;
}

namespace {

FieldSegment with_field(FieldSegment seg, const Eigen::Vector3d& b) {
  seg.b_field = b;
  return seg;
}

DensityMatrix write_state(const LevelScheme& scheme, const PulseSequence& seq, const Eigen::Vector3d& b,
                          const IntegratorConfig& integ, const UnitSystem& units) {
  const FieldSegment write = with_field(seq.write, b);
  const SegmentPropagator prop(scheme, build_hamiltonian(scheme, write, units), integ.dt, units);
  return prop.propagate(initial_ground_mixture(scheme), units.to_gamma_time(write.duration));
}

}  // namespace

StorageRun::StorageRun(const LevelScheme& scheme, const PulseSequence& sequence, const Eigen::Vector3d& b_actual,
                       const IntegratorConfig& integrator, const UnitSystem& units)
    : scheme_(scheme),
      sequence_(sequence),
      integrator_(integrator),
      units_(units),
      written_(write_state(scheme, sequence, b_actual, integrator, units)),
      dark_(scheme, b_actual, units),
      dark_rk4_(scheme, build_hamiltonian(scheme, with_field(sequence.dark, b_actual), units), integrator.dt, units),
      read_(scheme, build_hamiltonian(scheme, with_field(sequence.read, b_actual), units), integrator.dt, units),
      probe_(coherence_probe(scheme, sequence.detect_polarization)) {}

DensityMatrix StorageRun::stored_state(double storage_time_seconds) const {
  if (storage_time_seconds < 0.0) throw InvalidArgument("storage time must be non-negative");
  const double t = units_.to_gamma_time(storage_time_seconds);
  return integrator_.exact_dark ? dark_.apply(written_, t) : dark_rk4_.propagate(written_, t);
}

RetrievedTrace StorageRun::retrieve(double storage_time_seconds) const {
  const DensityMatrix rho = stored_state(storage_time_seconds);
  SegmentPropagator::Samples samples;
  read_.propagate(rho, units_.to_gamma_time(sequence_.read.duration), integrator_.sample_stride(), &probe_, &samples);

  RetrievedTrace trace;
  trace.storage_time = storage_time_seconds;
  trace.times.reserve(samples.times.size());
  for (double s : samples.times) trace.times.push_back(units_.to_seconds(s));
  trace.amplitude = std::move(samples.values);
  trace.intensity.reserve(trace.amplitude.size());
  for (const auto& a : trace.amplitude) trace.intensity.push_back(std::norm(a));
  return trace;
}

RetrievedTrace run_storage_sequence(const LevelScheme& scheme, const PulseSequence& sequence,
                                    const Eigen::Vector3d& b_actual, const IntegratorConfig& integrator,
                                    const UnitSystem& units) {
  sequence.validate();
  integrator.validate();
  return StorageRun(scheme, sequence, b_actual, integrator, units).retrieve(sequence.dark.duration);
}

double trace_error(const DensityMatrix& rho) { return std::abs(rho.trace() - 1.0); }

double hermiticity_error(const DensityMatrix& rho) { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double min_eigenvalue(const DensityMatrix& rho) {
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace zms
