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

#include "ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>

namespace zms {

void MagneticEnvironment::validate() const {
  if (!mean.allFinite()) throw ConfigError("environment.mean", "must be finite");
  if (!inhom_axis.allFinite() || std::abs(inhom_axis.norm() - 1.0) > 1e-12)
    throw ConfigError("environment.inhom_axis", "must be a unit vector");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("environment.sigma", "must be >= 0");
  if (n_samples < 1) throw ConfigError("environment.n_samples", "must be >= 1");
}

QuadratureRule gauss_hermite_normal(int n) {
  if (n < 1) throw InvalidArgument("quadrature order must be >= 1");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success) throw NumericalError("Gauss-Hermite eigenproblem failed");

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    rule.weights[i] = eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i);
  }
  // enforce the exact symmetry of the rule
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2) rule.nodes[n / 2] = 0.0;
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

std::vector<FieldSample> sample_fields(const MagneticEnvironment& env) {
  env.validate();
  std::vector<FieldSample> out;
  out.reserve(env.n_samples);
  if (env.sampler == Sampler::gauss_hermite) {
    const QuadratureRule rule = gauss_hermite_normal(env.n_samples);
    for (int i = 0; i < env.n_samples; ++i)
      out.push_back({env.mean + env.sigma * rule.nodes[i] * env.inhom_axis, rule.weights[i]});
  } else {
    std::mt19937_64 rng(env.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double w = 1.0 / env.n_samples;
    for (int i = 0; i < env.n_samples; ++i) out.push_back({env.mean + env.sigma * normal(rng) * env.inhom_axis, w});
  }
  return out;
}

int resolve_thread_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* cap = std::getenv("ZMS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && v >= 1) n = std::min<long>(n, v);
  }
  return n;
}

namespace {

// Runs task(i) for i in [0, count) on up to `threads` workers; rethrows the first failure.
template <typename Task>
void parallel_for(int count, int threads, Task&& task) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < count && !failed; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

EnsembleResult run_ensemble(const LevelScheme& scheme, const PulseSequence& sequence, const MagneticEnvironment& env,
                            const std::vector<double>& storage_times, const IntegratorConfig& integrator,
                            const UnitSystem& units, const EnsembleOptions& options) {
  scheme.validate();
  units.validate();
  sequence.validate();
  integrator.validate();
  if (storage_times.empty()) throw InvalidArgument("storage_times must be nonempty");
  for (double t : storage_times)
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("storage times must be finite and >= 0");

  EnsembleResult result;
  result.samples = sample_fields(env);
  const auto& samples = result.samples;

  // identical fields (sigma = 0) collapse to one solver run
  const bool uniform = std::all_of(samples.begin(), samples.end(),
                                   [&](const FieldSample& s) { return s.b == samples.front().b; });
  const int n_runs = uniform ? 1 : static_cast<int>(samples.size());
  const int n_times = static_cast<int>(storage_times.size());
  const int threads = resolve_thread_count(options.max_threads);

  std::vector<std::optional<StorageRun>> runs(n_runs);
  parallel_for(n_runs, threads, [&](int i) { runs[i].emplace(scheme, sequence, samples[i].b, integrator, units); });

  std::vector<RetrievedTrace> per_run(static_cast<std::size_t>(n_runs) * n_times);
  parallel_for(n_runs * n_times, threads,
               [&](int k) { per_run[k] = runs[k / n_times]->retrieve(storage_times[k % n_times]); });

  result.traces.resize(n_times);
  for (int it = 0; it < n_times; ++it) {
    RetrievedTrace& out = result.traces[it];
    if (uniform) {
      out = std::move(per_run[it]);
      continue;
    }
    out.storage_time = storage_times[it];
    out.times = per_run[it].times;
    const std::size_t len = out.times.size();
    out.amplitude.assign(len, Complex(0.0));
    std::vector<double> incoherent(len, 0.0);
    double weight_sum = 0.0;
    for (int i = 0; i < n_runs; ++i) {
      const RetrievedTrace& tr = per_run[static_cast<std::size_t>(i) * n_times + it];
      const double w = samples[i].weight;
      weight_sum += w;
      for (std::size_t k = 0; k < len; ++k) {
        out.amplitude[k] += w * tr.amplitude[k];
        incoherent[k] += w * tr.intensity[k];
      }
    }
    out.intensity.resize(len);
    for (std::size_t k = 0; k < len; ++k) {
      out.amplitude[k] /= weight_sum;
      out.intensity[k] =
          options.summation == Summation::coherent ? std::norm(out.amplitude[k]) : incoherent[k] / weight_sum;
    }
  }
  return result;
}

}  // namespace zms
