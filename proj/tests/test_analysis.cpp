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
#include <functional>
#include <numbers>

#include "analysis.hpp"
#include "doctest.h"

using namespace zms;

namespace {

PeakSeries series(const std::function<double(double)>& f, double stop_us, double step_us) {
  PeakSeries s;
  const int n = static_cast<int>(std::round(stop_us / step_us));
  for (int i = 0; i <= n; ++i) {
    const double t = i * step_us * 1e-6;
    s.storage_times.push_back(t);
    s.peak_time.push_back(0.0);
    s.peak_intensity.push_back(f(t));
  }
  return s;
}

RetrievedTrace trace_of(const std::vector<double>& intensity, double dt = 1e-7) {
  RetrievedTrace tr;
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    tr.times.push_back(dt * i);
    tr.intensity.push_back(intensity[i]);
    tr.amplitude.emplace_back(std::sqrt(intensity[i]), 0.0);
  }
  return tr;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("peak extraction") {
    const auto constant = extract_peaks({trace_of({0.4, 0.4, 0.4})});
    CHECK(constant.peak_intensity[0] == 0.4);
    CHECK(constant.peak_time[0] == 0.0);
    const auto single = extract_peaks({trace_of({0.7})});
    CHECK(single.peak_intensity[0] == 0.7);

    const double period = 2e-6, dt = 1e-9;
    std::vector<double> wave;
    for (int i = 0; i * dt <= 0.5 * period; ++i) wave.push_back(std::pow(std::sin(kTwoPi * i * dt / period), 2));
    const auto p = extract_peaks({trace_of(wave, dt)});
    CHECK(p.peak_intensity[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(p.peak_time[0] - period / 4.0) <= dt);

    std::vector<double> scaled = wave;
    for (double& v : scaled) v *= 3.5;
    const auto q = extract_peaks({trace_of(scaled, dt)});
    CHECK(q.peak_time[0] == p.peak_time[0]);
    CHECK(q.peak_intensity[0] == doctest::Approx(3.5 * p.peak_intensity[0]));

    RetrievedTrace empty;
    CHECK_THROWS_AS(extract_peaks({empty}), InvalidArgument);
  }

  TEST_CASE("exponential self-fit") {
    const auto s = series([](double t) { return std::exp(-t / 4e-6); }, 20.0, 0.5);
    const FitReport f = fit_envelope(s);
    CHECK(f.model == EnvelopeModel::exponential);
    CHECK(f.tau == doctest::Approx(4e-6).epsilon(0.01));
    CHECK(f.amplitude == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(f.offset) < 0.01);
    CHECK(f.r_squared > 0.9999);
    CHECK_FALSE(f.used_upper_envelope);
    CHECK(f.points_used == s.size());
  }

  TEST_CASE("Gaussian self-fit") {
    const auto s = series([](double t) { return std::exp(-std::pow(t / 5e-6, 2)); }, 20.0, 0.5);
    const FitReport f = fit_envelope(s);
    CHECK(f.model == EnvelopeModel::gaussian);
    CHECK(f.tau == doctest::Approx(5e-6).epsilon(0.01));
    CHECK(f.gaussian.r_squared > f.exponential.r_squared);
  }

  TEST_CASE("self-fit with offset and scale") {
    const auto s = series([](double t) { return 2.5 * std::exp(-t / 7e-6) + 0.3; }, 40.0, 0.5);
    const FitReport f = fit_envelope(s);
    CHECK(f.model == EnvelopeModel::exponential);
    CHECK(f.tau == doctest::Approx(7e-6).epsilon(0.01));
    CHECK(f.amplitude == doctest::Approx(2.5).epsilon(0.01));
    CHECK(f.offset == doctest::Approx(0.3).epsilon(0.01));
    CHECK(f.evaluate(7e-6) == doctest::Approx(2.5 / std::numbers::e + 0.3).epsilon(0.01));
  }

  TEST_CASE("oscillating series is fitted on its upper envelope") {
    const auto s = series(
        [](double t) { return std::exp(-std::pow(t / 12e-6, 2)) * (0.6 + 0.4 * std::cos(kTwoPi * 2e5 * t)); }, 40.0,
        0.25);
    const FitReport f = fit_envelope(s);
    CHECK(f.used_upper_envelope);
    CHECK(f.points_used < s.size());
    CHECK(f.model == EnvelopeModel::gaussian);
    CHECK(f.tau == doctest::Approx(12e-6).epsilon(0.05));
  }

  TEST_CASE("upper envelope indices") {
    CHECK(upper_envelope_indices({1, 2, 3, 4}).empty());
    CHECK(upper_envelope_indices({0, 1, 0, 0}).empty());
    const auto idx = upper_envelope_indices({3, 1, 2, 1, 2, 0});
    REQUIRE(idx.size() == 2);
    CHECK(idx[0] == 2);
    CHECK(idx[1] == 4);
  }

  TEST_CASE("fit errors") {
    CHECK_THROWS_AS(fit_envelope(series([](double) { return 1.0; }, 1.0, 0.5)), InvalidArgument);
    CHECK_THROWS_AS(fit_model(EnvelopeModel::gaussian, {0.0, 1.0}, {1.0, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(fit_model(EnvelopeModel::gaussian, {0.0, 1.0, 2.0}, {1.0, NAN, 0.5}), InvalidArgument);
    CHECK(envelope_model_from_string("gaussian") == EnvelopeModel::gaussian);
    CHECK(to_string(EnvelopeModel::exponential) == "exponential");
    CHECK_THROWS_AS(envelope_model_from_string("lorentzian"), InvalidArgument);
  }

  TEST_CASE("single tone frequency") {
    const double f0 = 1e5;
    const auto s = series([&](double t) { return std::cos(kTwoPi * f0 * t); }, 40.0, 0.5);
    const SpectrumReport r = dominant_frequencies(s);
    REQUIRE(!r.peaks.empty());
    CHECK(r.peaks[0].frequency == doctest::Approx(f0).epsilon(0.02));
    const double padded_bin = 1.0 / (s.size() * 16 * 0.5e-6);
    CHECK(std::abs(r.peaks[0].frequency - f0) < 0.5 * padded_bin);
    CHECK(r.peaks.size() <= 3);
    for (const auto& p : r.peaks) CHECK(p.frequency <= 1.0 / (2 * 0.5e-6));
  }

  TEST_CASE("two tones keep their amplitude ordering") {
    const double f0 = 1e5;
    const auto s = series(
        [&](double t) { return 1.0 * std::cos(kTwoPi * f0 * t) + 0.3 * std::cos(2.0 * kTwoPi * f0 * t); }, 40.0, 0.5);
    const SpectrumReport r = dominant_frequencies(s);
    REQUIRE(r.peaks.size() >= 2);
    // the weaker line sits on the leakage of the stronger one
    CHECK(r.peaks[0].frequency == doctest::Approx(f0).epsilon(0.02));
    CHECK(r.peaks[1].frequency == doctest::Approx(2 * f0).epsilon(0.05));
    CHECK(r.peaks[0].amplitude > r.peaks[1].amplitude);
    CHECK(r.peaks[0].amplitude == doctest::Approx(1.0).epsilon(0.1));
    CHECK(r.peaks[1].amplitude == doctest::Approx(0.3).epsilon(0.15));
  }

  TEST_CASE("damped oscillation above a decaying background") {
    const double f0 = 2.1e5;
    const auto s = series(
        [&](double t) { return std::exp(-t / 6e-6) * (1.0 + 0.5 * std::cos(kTwoPi * f0 * t)); }, 40.0, 0.5);
    const SpectrumReport r = dominant_frequencies(s);
    REQUIRE(!r.peaks.empty());
    CHECK(r.peaks[0].frequency == doctest::Approx(f0).epsilon(0.03));
  }

  TEST_CASE("spectral estimator preconditions") {
    const std::vector<double> t = {0, 1, 2, 3, 4, 5, 6}, y(7, 0.0);
    CHECK_THROWS_AS(spectral_peaks(t, y), InvalidArgument);
    std::vector<double> t8 = {0, 1, 2, 3, 4, 5, 6, 7.5}, y8(8, 1.0);
    CHECK_THROWS_AS(spectral_peaks(t8, y8), InvalidArgument);
    t8.back() = 7.0;
    CHECK_THROWS_AS(spectral_peaks(t8, y8, 4), InvalidArgument);
    CHECK_THROWS_AS(dominant_frequencies(series([](double) { return 1.0; }, 3.0, 0.5)), InvalidArgument);
  }

  TEST_CASE("linear fit") {
    const LinearFit line = linear_fit({0.0, 1.0, 2.0, 3.0}, {0.0, 2.0, 4.0, 6.0});
    CHECK(line.slope == doctest::Approx(2.0));
    CHECK(std::abs(line.intercept) < 1e-12);
    CHECK(line.r_squared == doctest::Approx(1.0));
    const LinearFit two = linear_fit({1.0, 3.0}, {5.0, 4.0});
    CHECK(two.slope == doctest::Approx(-0.5));
    CHECK(two.intercept == doctest::Approx(5.5));
    CHECK(two.r_squared == doctest::Approx(1.0));
    // least squares against the normal equations: y = 1, 2, 2, 4 at x = 0..3
    const LinearFit noisy = linear_fit({0, 1, 2, 3}, {1, 2, 2, 4});
    CHECK(noisy.slope == doctest::Approx(0.9));
    CHECK(noisy.intercept == doctest::Approx(0.9));
    CHECK(noisy.r_squared == doctest::Approx(0.81 * 5.0 / 4.75));
    CHECK_THROWS_AS(linear_fit({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), InvalidArgument);
    CHECK_THROWS_AS(linear_fit({1.0}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(linear_fit({1.0, 2.0}, {1.0}), InvalidArgument);
  }
}
