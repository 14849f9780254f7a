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

#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace zms {

std::string to_string(EnvelopeModel m) { return m == EnvelopeModel::exponential ? "exponential" : "gaussian"; }

EnvelopeModel envelope_model_from_string(const std::string& s) {
  if (s == "exponential") return EnvelopeModel::exponential;
  if (s == "gaussian") return EnvelopeModel::gaussian;
  throw InvalidArgument("unknown envelope model '" + s + "'");
}

double ModelFit::evaluate(double t) const {
  const double u = t / tau;
  return amplitude * (model == EnvelopeModel::exponential ? std::exp(-u) : std::exp(-u * u)) + offset;
}

PeakSeries extract_peaks(const std::vector<RetrievedTrace>& traces) {
  PeakSeries out;
  for (const auto& tr : traces) {
    if (tr.intensity.empty() || tr.times.size() != tr.intensity.size())
      throw InvalidArgument("cannot extract a peak from an empty trace");
    std::size_t best = 0;
    for (std::size_t k = 1; k < tr.intensity.size(); ++k)
      if (tr.intensity[k] > tr.intensity[best]) best = k;
    out.storage_times.push_back(tr.storage_time);
    out.peak_time.push_back(tr.times[best]);
    out.peak_intensity.push_back(tr.intensity[best]);
  }
  return out;
}

std::vector<std::size_t> upper_envelope_indices(const std::vector<double>& y) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    if (y[i] > y[i - 1] && y[i] >= y[i + 1]) idx.push_back(i);
  if (idx.size() < 2) idx.clear();
  return idx;
}

namespace {

constexpr int kMaxIterations = 500;
constexpr double kMinLogTau = -6.9;  // tau between 1e-3 and 1e3 of the time scale
constexpr double kMaxLogTau = 6.9;

struct LmState {
  Eigen::Vector3d p;  // a, log tau, c
  double cost = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

double basis(EnvelopeModel m, double u) { return m == EnvelopeModel::exponential ? std::exp(-u) : std::exp(-u * u); }

double cost_of(EnvelopeModel m, const Eigen::Vector3d& p, const Eigen::VectorXd& t, const Eigen::VectorXd& y) {
  const double tau = std::exp(p(1));
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double r = p(0) * basis(m, t(i) / tau) + p(2) - y(i);
    s += r * r;
  }
  return s;
}

LmState levenberg_marquardt(EnvelopeModel m, Eigen::Vector3d p, const Eigen::VectorXd& t, const Eigen::VectorXd& y) {
  const Eigen::Index n = t.size();
  LmState st;
  st.p = p;
  st.cost = cost_of(m, p, t, y);
  double lambda = 1e-3;
  Eigen::MatrixXd jac(n, 3);
  Eigen::VectorXd res(n);
  for (st.iterations = 0; st.iterations < kMaxIterations; ++st.iterations) {
    const double tau = std::exp(st.p(1));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = t(i) / tau;
      const double f = basis(m, u);
      jac(i, 0) = f;
      jac(i, 1) = m == EnvelopeModel::exponential ? st.p(0) * f * u : 2.0 * st.p(0) * u * u * f;
      jac(i, 2) = 1.0;
      res(i) = st.p(0) * f + st.p(2) - y(i);
    }
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d grad = jac.transpose() * res;
    if (grad.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + st.cost)) {
      st.converged = true;
      break;
    }
    bool accepted = false;
    while (lambda < 1e12) {
      Eigen::Matrix3d a = jtj;
      for (int k = 0; k < 3; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      Eigen::Vector3d trial = st.p + a.ldlt().solve(-grad);
      trial(1) = std::clamp(trial(1), kMinLogTau, kMaxLogTau);
      const double c = cost_of(m, trial, t, y);
      if (std::isfinite(c) && c < st.cost) {
        const double drop = st.cost - c;
        const double step = (trial - st.p).lpNorm<Eigen::Infinity>();
        st.p = trial;
        st.cost = c;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (drop <= 1e-14 * (st.cost + 1e-300) || step <= 1e-12) st.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    // no descent direction left: stationary to working precision
    if (!accepted) st.converged = true;
    if (st.converged) break;
  }
  return st;
}

double r_squared(double sse, const Eigen::VectorXd& y) {
  const double mean = y.mean();
  const double sst = (y.array() - mean).square().sum();
  if (sst <= 0.0) return sse <= 0.0 ? 1.0 : 0.0;
  return std::clamp(1.0 - sse / sst, 0.0, 1.0);
}

}  // namespace

ModelFit fit_model(EnvelopeModel model, const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw InvalidArgument("fit: time and value arrays differ in length");
  if (t.size() < 3) throw InvalidArgument("fit: at least 3 points are required");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!std::isfinite(t[i]) || !std::isfinite(y[i])) throw InvalidArgument("fit: non-finite input");
  const double t0 = *std::min_element(t.begin(), t.end());
  const double t1 = *std::max_element(t.begin(), t.end());
  const double scale = t1 - t0 > 0.0 ? t1 - t0 : 1.0;

  const Eigen::Index n = static_cast<Eigen::Index>(t.size());
  Eigen::VectorXd ts(n), ys(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ts(i) = t[i] / scale;
    ys(i) = y[i];
  }
  const double ymin = ys.minCoeff();
  const double ymax = ys.maxCoeff();
  const double yfirst = ys(std::min_element(t.begin(), t.end()) - t.begin());

  LmState best;
  bool any_converged = false;
  for (double tau0 : {0.05, 0.15, 0.4, 1.0, 3.0, 10.0}) {
    for (double c0 : {ymin, 0.0}) {
      const double a0 = (yfirst - c0 != 0.0) ? yfirst - c0 : ymax - ymin;
      const LmState st = levenberg_marquardt(model, Eigen::Vector3d(a0, std::log(tau0), c0), ts, ys);
      if (!std::isfinite(st.cost)) continue;
      any_converged = any_converged || st.converged;
      if (st.converged && (!best.converged || st.cost < best.cost)) best = st;
      if (!any_converged && st.cost < best.cost) best = st;
    }
  }
  if (!any_converged) {
    std::ostringstream msg;
    msg << to_string(model) << " envelope fit did not converge after " << kMaxIterations
        << " iterations (best cost " << best.cost << ", tau " << std::exp(best.p(1)) * scale << " s, " << n
        << " points)";
    throw NumericalError(msg.str());
  }
  ModelFit fit;
  fit.model = model;
  fit.amplitude = best.p(0);
  fit.tau = std::exp(best.p(1)) * scale;
  fit.offset = best.p(2);
  fit.iterations = best.iterations;
  fit.r_squared = r_squared(best.cost, ys);
  return fit;
}

FitReport fit_envelope(const PeakSeries& series) {
  if (series.size() < 4) throw InvalidArgument("fit_envelope needs at least 4 points");
  std::vector<double> t = series.storage_times;
  std::vector<double> y = series.peak_intensity;
  FitReport report;
  const auto idx = upper_envelope_indices(y);
  if (idx.size() >= 3) {
    std::vector<double> te, ye;
    for (std::size_t i : idx) {
      te.push_back(t[i]);
      ye.push_back(y[i]);
    }
    t = std::move(te);
    y = std::move(ye);
    report.used_upper_envelope = true;
  }
  report.points_used = t.size();
  report.exponential = fit_model(EnvelopeModel::exponential, t, y);
  report.gaussian = fit_model(EnvelopeModel::gaussian, t, y);
  static_cast<ModelFit&>(report) =
      report.gaussian.r_squared > report.exponential.r_squared ? report.gaussian : report.exponential;
  return report;
}

SpectrumReport spectral_peaks(const std::vector<double>& t, const std::vector<double>& residual, int pad_factor) {
  const std::size_t n = t.size();
  if (n < 8) throw InvalidArgument("spectral analysis needs at least 8 points");
  if (residual.size() != n) throw InvalidArgument("spectral analysis: array lengths differ");
  if (pad_factor < 8) throw InvalidArgument("zero padding factor must be >= 8");
  const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) throw InvalidArgument("storage times must be increasing");
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) throw InvalidArgument("storage times must be uniformly spaced");

  const std::size_t npad = n * static_cast<std::size_t>(pad_factor);
  const std::size_t half = npad / 2;
  std::vector<double> mag(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    Complex sum(0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * j) % npad) / static_cast<double>(npad);
      sum += residual[j] * std::polar(1.0, phase);
    }
    mag[k] = std::abs(sum);
  }

  const double bin = 1.0 / (static_cast<double>(npad) * dt);
  const double raw_bin = 1.0 / (static_cast<double>(n) * dt);
  std::vector<SpectralPeak> candidates;
  for (std::size_t k = 1; k < half; ++k) {
    if (!(mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])) continue;
    const double a = mag[k - 1], b = mag[k], c = mag[k + 1];
    const double denom = a - 2.0 * b + c;
    const double delta = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    const double f = (static_cast<double>(k) + delta) * bin;
    if (f < raw_bin) continue;
    candidates.push_back({f, 2.0 * (b - 0.25 * (a - c) * delta) / static_cast<double>(n)});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const SpectralPeak& x, const SpectralPeak& y) { return x.amplitude > y.amplitude; });

  // window sidelobes of a stronger line are not separate peaks
  SpectrumReport report;
  for (const auto& p : candidates) {
    const bool sidelobe = std::any_of(report.peaks.begin(), report.peaks.end(), [&](const SpectralPeak& q) {
      return std::abs(q.frequency - p.frequency) < 2.5 * raw_bin;
    });
    if (sidelobe) continue;
    report.peaks.push_back(p);
    if (report.peaks.size() == 3) break;
  }
  return report;
}

SpectrumReport dominant_frequencies(const PeakSeries& series) {
  if (series.size() < 8) throw InvalidArgument("dominant_frequencies needs at least 8 points");
  const auto& t = series.storage_times;
  const auto& y = series.peak_intensity;
  // trend: the selected envelope model refitted through all points (the oscillation mid-line)
  std::vector<double> residual(y.size());
  try {
    const FitReport env = fit_envelope(series);
    const ModelFit trend = fit_model(env.model, t, y);
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - trend.evaluate(t[i]);
  } catch (const NumericalError&) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - mean;
  }
  return spectral_peaks(t, residual);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("linear_fit: arrays differ in length");
  if (x.size() < 2) throw InvalidArgument("linear_fit needs at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0, sx2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sx2 += x[i] * x[i];
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 1e-24 * sx2)) throw InvalidArgument("linear_fit: x values are degenerate");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace zms
