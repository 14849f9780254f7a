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

#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "ensemble.hpp"

using namespace zms;

namespace {

const UnitSystem kUnits;

// Probabilists' Hermite polynomials by recurrence: returns He_n(x) and He_{n-1}(x).
std::pair<double, double> hermite(int n, double x) {
  double prev = 1.0, cur = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

double double_factorial(int k) {
  double r = 1.0;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

LevelScheme scheme() { return {AngularMomentum::from_twice(2), AngularMomentum::from_twice(0)}; }

SphericalPolarization cart(double x, double y, double z) { return spherical_components(Eigen::Vector3cd(x, y, z)); }

// Shortened version of the storage protocol so the Monte Carlo comparison stays fast.
PulseSequence short_sequence() {
  PulseSequence s;
  s.write.duration = 2e-6;
  s.write.optical_fields = {{0.5, cart(1, 0, 0), 0.0, 0.0}, {0.25, cart(0, 1, 0), 0.0, 0.0}};
  s.read.duration = 0.6e-6;
  s.read.optical_fields = {{0.125, cart(0, 1, 0), 0.0, 0.0}};
  s.detect_polarization = cart(1, 0, 0);
  return s;
}

// Zeeman spread of 5e-3 Gamma expressed in gauss.
double default_sigma() { return 0.005 / std::abs(kUnits.zeeman_per_gauss(-0.25)); }

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("three-point Gauss-Hermite rule") {
    const QuadratureRule r = gauss_hermite_normal(3);
    REQUIRE(r.nodes.size() == 3);
    CHECK(r.nodes[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
    CHECK(std::abs(r.nodes[1]) < 1e-15);
    CHECK(r.nodes[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(r.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.weights[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK_THROWS_AS(gauss_hermite_normal(0), InvalidArgument);
    const QuadratureRule one = gauss_hermite_normal(1);
    CHECK(one.nodes[0] == 0.0);
    CHECK(one.weights[0] == 1.0);
  }

  TEST_CASE("Gauss-Hermite nodes are Hermite roots with the closed-form weights") {
    for (int n : {2, 5, 8, 21, 31, 40}) {
      const QuadratureRule r = gauss_hermite_normal(n);
      double sum = 0.0, lgn = std::lgamma(n + 1.0);
      for (int i = 0; i < n; ++i) {
        const auto [hn, hn1] = hermite(n, r.nodes[i]);
        // derivative He_n' = n He_{n-1}; residual measured in node units
        CHECK(std::abs(hn / (n * hn1)) < 1e-11 * std::max(1.0, std::abs(r.nodes[i])));
        const double w = std::exp(lgn - 2.0 * std::log(n) - 2.0 * std::log(std::abs(hn1)));
        CAPTURE(n);
        CAPTURE(i);
        CHECK(std::abs(r.weights[i] - w) < 1e-12 + 1e-9 * w);
        if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
        CHECK(r.nodes[i] == -r.nodes[n - 1 - i]);
        CHECK(r.weights[i] == r.weights[n - 1 - i]);
        sum += r.weights[i];
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }

  TEST_CASE("Gauss-Hermite integrates normal moments exactly") {
    const int n = 10;
    const QuadratureRule r = gauss_hermite_normal(n);
    for (int k = 0; k < 2 * n; ++k) {
      double m = 0.0;
      for (int i = 0; i < n; ++i) m += r.weights[i] * std::pow(r.nodes[i], k);
      const double expected = k % 2 ? 0.0 : double_factorial(k - 1);
      CHECK(std::abs(m - expected) < 1e-12 * double_factorial(k));
    }
  }

  TEST_CASE("field samples") {
    MagneticEnvironment env;
    env.mean = Eigen::Vector3d(0.1, 0.2, 0.3);
    env.sigma = 0.0;
    env.n_samples = 7;
    for (const auto& s : sample_fields(env)) CHECK(s.b == env.mean);

    env.sigma = 0.05;
    env.n_samples = 3;
    env.inhom_axis = Eigen::Vector3d(0, 0, 1);
    const auto gh = sample_fields(env);
    REQUIRE(gh.size() == 3);
    CHECK(gh[0].b.z() == doctest::Approx(0.3 - std::sqrt(3.0) * 0.05));
    CHECK(gh[0].b.x() == 0.1);
    CHECK(gh[1].weight == doctest::Approx(2.0 / 3.0));

    env.sampler = Sampler::monte_carlo;
    env.n_samples = 4000;
    env.seed = 42;
    const auto a = sample_fields(env);
    const auto b = sample_fields(env);
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].b == b[i].b);
      CHECK(a[i].weight == 1.0 / 4000.0);
      CHECK(a[i].b.head<2>() == env.mean.head<2>());
      mean += (a[i].b.z() - 0.3) / 4000.0;
    }
    for (const auto& s : a) var += std::pow(s.b.z() - 0.3 - mean, 2) / 3999.0;
    CHECK(std::abs(mean) < 4.0 * 0.05 / std::sqrt(4000.0));
    CHECK(std::sqrt(var) == doctest::Approx(0.05).epsilon(0.05));
    env.seed = 43;
    CHECK(sample_fields(env)[0].b != a[0].b);
  }

  TEST_CASE("environment validation") {
    MagneticEnvironment env;
    CHECK_NOTHROW(env.validate());
    env.n_samples = 0;
    CHECK_THROWS_AS(env.validate(), ConfigError);
    env.n_samples = 1;
    env.sigma = -1.0;
    CHECK_THROWS_AS(env.validate(), ConfigError);
    env.sigma = 0.0;
    env.inhom_axis = Eigen::Vector3d(1, 1, 0);
    CHECK_THROWS_AS(env.validate(), ConfigError);
  }

  TEST_CASE("zero spread reproduces the single sub-sample run exactly") {
    MagneticEnvironment env;
    env.mean = Eigen::Vector3d(0.0, 0.3, 0.0);
    env.sigma = 0.0;
    env.n_samples = 5;
    const IntegratorConfig integ;
    PulseSequence seq = short_sequence();
    const EnsembleResult ens = run_ensemble(scheme(), seq, env, {0.0, 2e-6}, integ, kUnits);
    REQUIRE(ens.traces.size() == 2);
    seq.dark.duration = 2e-6;
    const RetrievedTrace single = run_storage_sequence(scheme(), seq, env.mean, integ, kUnits);
    CHECK(ens.traces[1].amplitude == single.amplitude);
    CHECK(ens.traces[1].intensity == single.intensity);
    CHECK(ens.traces[1].times == single.times);
    CHECK(ens.traces[1].storage_time == 2e-6);
  }

  TEST_CASE("result does not depend on the number of workers") {
    MagneticEnvironment env;
    env.mean = Eigen::Vector3d(0.1, 0.2, 0.0);
    env.sigma = 0.2;
    env.n_samples = 6;
    EnsembleOptions serial, parallel;
    serial.max_threads = 1;
    parallel.max_threads = 4;
    const std::vector<double> times = {0.0, 1e-6, 3e-6};
    const auto a = run_ensemble(scheme(), short_sequence(), env, times, {}, kUnits, serial);
    const auto b = run_ensemble(scheme(), short_sequence(), env, times, {}, kUnits, parallel);
    for (std::size_t k = 0; k < times.size(); ++k) {
      CHECK(a.traces[k].amplitude == b.traces[k].amplitude);
      CHECK(a.traces[k].intensity == b.traces[k].intensity);
    }
  }

  TEST_CASE("thread count honors the environment cap") {
    CHECK(resolve_thread_count(3) >= 1);
    ::setenv("ZMS_THREADS", "1", 1);
    CHECK(resolve_thread_count(8) == 1);
    CHECK(resolve_thread_count(0) == 1);
    ::unsetenv("ZMS_THREADS");
  }

  TEST_CASE("coherent and incoherent sums") {
    MagneticEnvironment env;
    env.sigma = 0.3;
    env.n_samples = 4;
    const IntegratorConfig integ;
    EnsembleOptions coherent, incoherent;
    incoherent.summation = Summation::incoherent;
    const auto c = run_ensemble(scheme(), short_sequence(), env, {1e-6}, integ, kUnits, coherent);
    const auto i = run_ensemble(scheme(), short_sequence(), env, {1e-6}, integ, kUnits, incoherent);
    const auto samples = sample_fields(env);
    PulseSequence seq = short_sequence();
    seq.dark.duration = 1e-6;
    std::vector<Complex> amp(c.traces[0].amplitude.size(), 0.0);
    std::vector<double> power(amp.size(), 0.0);
    for (const auto& s : samples) {
      const auto tr = run_storage_sequence(scheme(), seq, s.b, integ, kUnits);
      for (std::size_t k = 0; k < amp.size(); ++k) {
        amp[k] += s.weight * tr.amplitude[k];
        power[k] += s.weight * tr.intensity[k];
      }
    }
    for (std::size_t k = 0; k < amp.size(); ++k) {
      CHECK(std::abs(c.traces[0].amplitude[k] - amp[k]) < 1e-15);
      CHECK(c.traces[0].intensity[k] == doctest::Approx(std::norm(amp[k])).epsilon(1e-12));
      CHECK(i.traces[0].intensity[k] == doctest::Approx(power[k]).epsilon(1e-12));
      CHECK(i.traces[0].intensity[k] >= c.traces[0].intensity[k] * (1.0 - 1e-12));
    }
  }

  TEST_CASE("invalid storage times") {
    MagneticEnvironment env;
    env.n_samples = 1;
    CHECK_THROWS_AS(run_ensemble(scheme(), short_sequence(), env, {}, {}, kUnits), InvalidArgument);
    CHECK_THROWS_AS(run_ensemble(scheme(), short_sequence(), env, {-1e-6}, {}, kUnits), InvalidArgument);
  }
}

TEST_SUITE("ensemble-slow") {
  TEST_CASE("Gauss-Hermite and Monte Carlo agree within three standard errors") {
    // peak intensity, compared through the coherent amplitude at the sample of the GH peak
    MagneticEnvironment env;
    env.mean = Eigen::Vector3d(0.0, 0.0, 0.0);
    env.sigma = default_sigma();
    const IntegratorConfig integ;
    const std::vector<double> storage = {0.0, 2e-6, 4e-6, 6e-6};

    env.n_samples = 21;
    const auto gh = run_ensemble(scheme(), short_sequence(), env, storage, integ, kUnits);

    env.sampler = Sampler::monte_carlo;
    env.n_samples = 2000;
    env.seed = 2024;
    const auto samples = sample_fields(env);
    for (std::size_t k = 0; k < storage.size(); ++k) {
      const auto& trace = gh.traces[k];
      std::size_t best = 0;
      for (std::size_t j = 1; j < trace.intensity.size(); ++j)
        if (trace.intensity[j] > trace.intensity[best]) best = j;

      Complex mean(0.0);
      std::vector<Complex> values;
      for (const auto& s : samples) {
        const StorageRun run(scheme(), short_sequence(), s.b, integ, kUnits);
        values.push_back(run.retrieve(storage[k]).amplitude[best]);
        mean += values.back() / double(samples.size());
      }
      double var = 0.0;
      for (const auto& v : values) var += std::norm(v - mean) / double(values.size() - 1);
      const double se_amp = std::sqrt(var / double(values.size()));
      // delta method for |A|^2
      const double mc_intensity = std::norm(mean);
      const double se_intensity = 2.0 * std::abs(mean) * se_amp;
      CAPTURE(k);
      CAPTURE(mc_intensity);
      CAPTURE(trace.intensity[best]);
      CHECK(std::abs(mc_intensity - trace.intensity[best]) <= 3.0 * se_intensity);
    }
  }
}
