// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "softcreep/distributions.hpp"
#include "softcreep/errors.hpp"
#include "softcreep/rng.hpp"
#include "softcreep/simulate.hpp"
#include "softcreep/viscoelastic.hpp"

namespace softcreep {

// A batch of creep trials recorded under the same constant torque step.
struct TrialSet {
  std::vector<Trajectory> trials;
  Vec3 torque_step{0.0, 0.0, 0.0};
};

// Outcome of fitting the creep model to one joint of one trial.
struct JointFit {
  bool ok = false;
  std::string message;
  JointViscoelasticity params{};
  double q_ini = 0.0;
  double sse = 0.0;
  int iterations = 0;
};

struct CreepFitResult {
  std::array<JointFit, 3> joints{};
};

namespace detail {

// Gaussian elimination with partial pivoting for the 4x4 normal equations.
inline std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> a,
                                    std::array<double, 4> b) {
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 4; ++row)
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    if (std::abs(a[pivot][col]) < 1e-300)
      throw NumericalError("singular system in creep fit");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int row = col + 1; row < 4; ++row) {
      const double f = a[row][col] / a[col][col];
      for (int k = col; k < 4; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  std::array<double, 4> x{};
  for (int col = 3; col >= 0; --col) {
    double s = b[col];
    for (int k = col + 1; k < 4; ++k) s -= a[col][k] * x[k];
    x[col] = s / a[col][col];
  }
  return x;
}

// Creep model and its Jacobian in the fitting parameterization
// theta = (log cv, log cp, log kv, q_ini). Log coordinates keep the
// material parameters positive without constrained optimization.
struct CreepModel {
  double k = 0.0;  // torque step magnitude

  double eval(const std::array<double, 4>& theta, double t) const {
    const double cv = std::exp(theta[0]);
    const double cp = std::exp(theta[1]);
    const double kv = std::exp(theta[2]);
    const double e = std::exp(-kv * t / cv);
    return (k / kv) * (1.0 - e) + (k / cp) * t + theta[3];
  }

  std::array<double, 4> grad(const std::array<double, 4>& theta, double t) const {
    const double cv = std::exp(theta[0]);
    const double cp = std::exp(theta[1]);
    const double kv = std::exp(theta[2]);
    const double e = std::exp(-kv * t / cv);
    return {-k * t * e / cv,
            -k * t / cp,
            -(k / kv) * (1.0 - e) + (k * t / cv) * e,
            1.0};
  }
};

struct LmOutcome {
  bool converged = false;
  std::array<double, 4> theta{};
  double sse = 0.0;
  int iterations = 0;
};

inline double creep_sse(const CreepModel& model, const std::array<double, 4>& theta,
                        const std::vector<double>& t, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double r = model.eval(theta, t[j]) - y[j];
    s += r * r;
  }
  return s;
}

inline LmOutcome levenberg_marquardt(const CreepModel& model,
                                     std::array<double, 4> theta,
                                     const std::vector<double>& t,
                                     const std::vector<double>& y) {
  LmOutcome out;
  double sse = creep_sse(model, theta, t, y);
  double lambda = 1e-3;
  for (int iter = 0; iter < 200; ++iter) {
    out.iterations = iter + 1;
    std::array<std::array<double, 4>, 4> h{};
    std::array<double, 4> g{};
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double r = model.eval(theta, t[j]) - y[j];
      const auto jac = model.grad(theta, t[j]);
      for (int a = 0; a < 4; ++a) {
        g[a] += jac[a] * r;
        for (int b = 0; b < 4; ++b) h[a][b] += jac[a] * jac[b];
      }
    }
    bool stepped = false;
    while (lambda < 1e9) {
      auto damped = h;
      for (int a = 0; a < 4; ++a)
        damped[a][a] += lambda * (h[a][a] > 0.0 ? h[a][a] : 1.0);
      std::array<double, 4> delta{};
      try {
        auto rhs = g;
        for (auto& v : rhs) v = -v;
        delta = solve4(damped, rhs);
      } catch (const NumericalError&) {
        lambda *= 10.0;
        continue;
      }
      std::array<double, 4> next = theta;
      for (int a = 0; a < 4; ++a) next[a] += delta[a];
      // Keep the log coordinates in a range where exp() stays finite.
      bool sane = true;
      for (int a = 0; a < 3; ++a)
        if (!std::isfinite(next[a]) || std::abs(next[a]) > 60.0) sane = false;
      if (!sane || !std::isfinite(next[3])) {
        lambda *= 10.0;
        continue;
      }
      const double next_sse = creep_sse(model, next, t, y);
      if (std::isfinite(next_sse) && next_sse <= sse) {
        double max_step = 0.0;
        for (double d : delta) max_step = std::max(max_step, std::abs(d));
        const double drop = sse - next_sse;
        theta = next;
        sse = next_sse;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (max_step < 1e-10 || drop < 1e-14 * (sse + 1e-30)) {
          out.converged = true;
          out.theta = theta;
          out.sse = sse;
          return out;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) break;
  }
  // A stalled search still counts if it reached a stationary point.
  out.converged = false;
  out.theta = theta;
  out.sse = sse;
  return out;
}

// Data-driven initial guess: the asymptotic slope identifies cp, the
// intercept of that asymptote identifies kv, and the knee time scale
// ties cv to kv.
inline std::array<double, 4> creep_start(double k, const std::vector<double>& t,
                                         const std::vector<double>& y) {
  const std::size_t n = t.size();
  const double t_end = t.back();
  const double y0 = y.front();
  // Least-squares line through the last quarter of the record.
  const std::size_t tail = std::max<std::size_t>(2, n / 4);
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t j = n - tail; j < n; ++j) {
    st += t[j];
    sy += y[j];
    stt += t[j] * t[j];
    sty += t[j] * y[j];
  }
  const double m = static_cast<double>(tail);
  const double denom = m * stt - st * st;
  double slope = denom > 0.0 ? (m * sty - st * sy) / denom : 0.0;
  double intercept = (sy - slope * st) / m;
  const double slope_floor = 1e-6 * std::abs(k) / std::max(t_end, 1e-12);
  slope = std::max(std::abs(slope), slope_floor);
  double amp = intercept - y0;
  const double amp_floor = 1e-6 * std::abs(k);
  amp = std::max(std::abs(amp), amp_floor);
  const double cp0 = std::abs(k) / slope;
  const double kv0 = std::abs(k) / amp;
  const double cv0 = kv0 * t_end / 5.0;
  return {std::log(cv0), std::log(cp0), std::log(kv0), y0};
}

}  // namespace detail

// Fits the three-element creep response to one joint trace. The search
// runs from a small deterministic family of starts spread over decades
// around a data-driven guess and keeps the best converged result.
inline JointFit fit_creep_joint(const std::vector<double>& t,
                                const std::vector<double>& y, double torque_step) {
  JointFit fit;
  if (t.size() != y.size() || t.size() < 5) {
    fit.message = "too few samples";
    return fit;
  }
  if (torque_step == 0.0) {
    fit.message = "zero torque step";
    return fit;
  }
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (!std::isfinite(t[j]) || !std::isfinite(y[j])) {
      fit.message = "non-finite sample";
      return fit;
    }
  }

  // A negative step mirrors the response; fit the mirrored trace and
  // flip the offset back afterwards.
  const bool flipped = torque_step < 0.0;
  std::vector<double> yy = y;
  if (flipped)
    for (auto& v : yy) v = -v;
  detail::CreepModel model{std::abs(torque_step)};

  const auto base = detail::creep_start(model.k, t, yy);
  constexpr std::array<std::array<double, 3>, 8> kScales{{{1.0, 1.0, 1.0},
                                                          {0.1, 1.0, 1.0},
                                                          {10.0, 1.0, 1.0},
                                                          {1.0, 0.1, 1.0},
                                                          {1.0, 10.0, 1.0},
                                                          {1.0, 1.0, 0.1},
                                                          {1.0, 1.0, 10.0},
                                                          {0.1, 0.1, 0.1}}};
  bool any = false;
  detail::LmOutcome best;
  for (const auto& scale : kScales) {
    std::array<double, 4> start = base;
    for (int a = 0; a < 3; ++a) start[a] += std::log(scale[a]);
    const auto run = detail::levenberg_marquardt(model, start, t, yy);
    if (!run.converged) continue;
    if (!any || run.sse < best.sse) {
      best = run;
      any = true;
    }
  }
  if (!any) {
    fit.message = "no start converged";
    return fit;
  }
  fit.ok = true;
  fit.params = {std::exp(best.theta[0]), std::exp(best.theta[1]),
                std::exp(best.theta[2])};
  fit.q_ini = flipped ? -best.theta[3] : best.theta[3];
  fit.sse = best.sse;
  fit.iterations = best.iterations;
  return fit;
}

// Fits all three joints of a recorded creep trial.
inline CreepFitResult fit_creep_params(const Trajectory& trial,
                                       const Vec3& torque_step) {
  if (trial.t.size() != trial.q.size())
    throw DataError("trajectory time and angle columns disagree");
  CreepFitResult result;
  for (int i = 0; i < 3; ++i) {
    std::vector<double> y(trial.q.size());
    for (std::size_t j = 0; j < trial.q.size(); ++j) y[j] = trial.q[j][i];
    result.joints[i] = fit_creep_joint(trial.t, y, torque_step[i]);
  }
  return result;
}

namespace detail {

inline double median_sorted(const std::vector<double>& x) {
  const std::size_t n = x.size();
  return n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

}  // namespace detail

// Removes gross outliers from positive material-parameter samples.
// Screening happens in log space, where the samples are expected to be
// roughly Gaussian: points beyond three scaled median absolute
// deviations from the median are dropped, and the screen repeats until
// it reaches a fixpoint. The scale factor 1.4826 makes the MAD a
// consistent estimate of a Gaussian standard deviation, so the cut sits
// near three sigma regardless of sample spread. Returns the survivors
// in ascending order.
inline std::vector<double> reject_outliers(const std::vector<double>& samples) {
  if (samples.empty()) throw DataError("outlier rejection: no samples");
  std::vector<double> kept;
  kept.reserve(samples.size());
  for (double v : samples)
    if (std::isfinite(v) && v > 0.0) kept.push_back(v);
  if (kept.empty())
    throw DataError("outlier rejection: no positive finite samples");
  std::sort(kept.begin(), kept.end());
  for (;;) {
    std::vector<double> logs(kept.size());
    std::transform(kept.begin(), kept.end(), logs.begin(),
                   [](double v) { return std::log(v); });
    const double med = detail::median_sorted(logs);
    std::vector<double> dev(logs.size());
    for (std::size_t j = 0; j < logs.size(); ++j) dev[j] = std::abs(logs[j] - med);
    std::sort(dev.begin(), dev.end());
    const double scale = 1.4826 * detail::median_sorted(dev);
    if (scale == 0.0) break;
    std::vector<double> next;
    next.reserve(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (std::abs(logs[j] - med) <= 3.0 * scale) next.push_back(kept[j]);
    if (next.size() == kept.size()) break;
    kept = std::move(next);
  }
  return kept;
}

// Same screen in linear coordinates, for samples that may take either
// sign (initial angles).
inline std::vector<double> reject_outliers_symmetric(
    const std::vector<double>& samples) {
  if (samples.empty()) throw DataError("outlier rejection: no samples");
  std::vector<double> kept;
  kept.reserve(samples.size());
  for (double v : samples)
    if (std::isfinite(v)) kept.push_back(v);
  if (kept.empty()) throw DataError("outlier rejection: no finite samples");
  std::sort(kept.begin(), kept.end());
  for (;;) {
    const double med = detail::median_sorted(kept);
    std::vector<double> dev(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) dev[j] = std::abs(kept[j] - med);
    std::sort(dev.begin(), dev.end());
    const double scale = 1.4826 * detail::median_sorted(dev);
    if (scale == 0.0) break;
    std::vector<double> next;
    next.reserve(kept.size());
    for (double v : kept)
      if (std::abs(v - med) <= 3.0 * scale) next.push_back(v);
    if (next.size() == kept.size()) break;
    kept = std::move(next);
  }
  return kept;
}

// Moment fit of a lognormal shape: mean and population standard
// deviation of the log samples.
inline LogNormalShape fit_lognormal(const std::vector<double>& samples) {
  if (samples.size() < 2)
    throw DataError("lognormal fit needs at least two samples");
  std::vector<double> logs;
  logs.reserve(samples.size());
  for (double v : samples) {
    if (!std::isfinite(v) || v <= 0.0)
      throw DataError("lognormal fit: samples must be positive and finite");
    logs.push_back(std::log(v));
  }
  std::sort(logs.begin(), logs.end());
  double mu = 0.0;
  for (double v : logs) mu += v;
  mu /= static_cast<double>(logs.size());
  double var = 0.0;
  for (double v : logs) var += (v - mu) * (v - mu);
  var /= static_cast<double>(logs.size());
  if (var == 0.0) throw DataError("lognormal fit: degenerate sample");
  return LogNormalShape{std::sqrt(var), mu};
}

inline NormalShape fit_normal(const std::vector<double>& samples) {
  if (samples.size() < 2)
    throw DataError("normal fit needs at least two samples");
  std::vector<double> x;
  x.reserve(samples.size());
  for (double v : samples) {
    if (!std::isfinite(v)) throw DataError("normal fit: samples must be finite");
    x.push_back(v);
  }
  std::sort(x.begin(), x.end());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  if (var == 0.0) throw DataError("normal fit: degenerate sample");
  return NormalShape{mean, std::sqrt(var)};
}

// Per-joint bookkeeping from a batch estimation run.
struct EstimationSummary {
  ParameterDistributions dists{};
  std::array<int, 3> trials_used{};
  // Kept sample counts after outlier rejection, indexed cv, cp, kv, q_ini.
  std::array<std::array<int, 4>, 3> kept{};
  // The surviving samples themselves (ascending), same indexing.
  std::array<std::array<std::vector<double>, 4>, 3> samples{};
  std::vector<std::string> failures;
};

// Full estimation pipeline: fit every trial, screen the per-parameter
// sample sets, and summarize each as a distribution. Trial order does
// not affect the result because every sample set is sorted before use.
inline EstimationSummary estimate_distributions(const TrialSet& data) {
  if (data.trials.empty()) throw DataError("no trials to estimate from");
  EstimationSummary summary;
  std::array<std::array<std::vector<double>, 4>, 3> pools;
  for (std::size_t n = 0; n < data.trials.size(); ++n) {
    const auto fits = fit_creep_params(data.trials[n], data.torque_step);
    for (int i = 0; i < 3; ++i) {
      const auto& fit = fits.joints[i];
      if (!fit.ok) {
        summary.failures.push_back("trial " + std::to_string(n) + " joint " +
                                   std::to_string(i + 1) + ": " + fit.message);
        continue;
      }
      ++summary.trials_used[i];
      pools[i][0].push_back(fit.params.cv);
      pools[i][1].push_back(fit.params.cp);
      pools[i][2].push_back(fit.params.kv);
      pools[i][3].push_back(fit.q_ini);
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (summary.trials_used[i] < 2)
      throw DataError("joint " + std::to_string(i + 1) +
                      ": not enough successful fits");
    auto cv = reject_outliers(pools[i][0]);
    auto cp = reject_outliers(pools[i][1]);
    auto kv = reject_outliers(pools[i][2]);
    auto qi = reject_outliers_symmetric(pools[i][3]);
    summary.kept[i] = {static_cast<int>(cv.size()), static_cast<int>(cp.size()),
                       static_cast<int>(kv.size()), static_cast<int>(qi.size())};
    summary.dists[i].cv = fit_lognormal(cv);
    summary.dists[i].cp = fit_lognormal(cp);
    summary.dists[i].kv = fit_lognormal(kv);
    summary.dists[i].q_ini = fit_normal(qi);
    summary.samples[i] = {std::move(cv), std::move(cp), std::move(kv),
                          std::move(qi)};
  }
  return summary;
}

// Joint parameters and initial angles drawn for one synthetic trial.
struct TrialParams {
  std::array<JointViscoelasticity, 3> joints{};
  Vec3 q_ini{0.0, 0.0, 0.0};
};

// Draws one trial's worth of parameters. Counters 0..11 of the stream
// are consumed in joint-major order (cv, cp, kv, q_ini per joint).
inline TrialParams sample_trial_params(const ParameterDistributions& dists,
                                       const RandomStream& stream) {
  TrialParams p;
  std::uint64_t c = 0;
  for (int i = 0; i < 3; ++i) {
    p.joints[i].cv = dists[i].cv.sample(stream, c++);
    p.joints[i].cp = dists[i].cp.sample(stream, c++);
    p.joints[i].kv = dists[i].kv.sample(stream, c++);
    p.q_ini[i] = dists[i].q_ini.sample(stream, c++);
  }
  return p;
}

// Synthesizes one noisy creep recording on a uniform sampling grid from
// the analytic step response. Measurement noise is additive Gaussian,
// drawn one counter per sample so the record is reproducible regardless
// of evaluation order.
inline Trajectory synthesize_trial(const TrialParams& params, const Vec3& torque_step,
                                   double t_end, double sample_rate_hz,
                                   double noise_sd, const RandomStream& stream) {
  if (!(t_end > 0.0) || !(sample_rate_hz > 0.0))
    throw ConfigError("trial synthesis needs a positive horizon and rate");
  if (noise_sd < 0.0) throw ConfigError("noise level must be non-negative");
  const auto n = static_cast<std::size_t>(std::floor(t_end * sample_rate_hz)) + 1;
  Trajectory out;
  out.t.resize(n);
  out.q.resize(n);
  out.tau.assign(n, torque_step);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / sample_rate_hz;
    out.t[j] = t;
    for (int i = 0; i < 3; ++i) {
      double q = step_response(params.joints[i], torque_step[i], params.q_ini[i], t);
      if (noise_sd > 0.0) {
        const double u = stream.uniform(j * 3 + static_cast<std::uint64_t>(i));
        q += noise_sd * normal_quantile(u);
      }
      out.q[j][i] = q;
    }
  }
  return out;
}

}  // namespace softcreep
