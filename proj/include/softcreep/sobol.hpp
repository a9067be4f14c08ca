// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "softcreep/distributions.hpp"
#include "softcreep/errors.hpp"
#include "softcreep/rng.hpp"
#include "softcreep/viscoelastic.hpp"

namespace softcreep {

// Parameter order used by every sensitivity interface.
inline constexpr std::array<const char*, 4> kParameterNames{"cv", "cp", "kv",
                                                            "q_ini"};

// First-order Sobol indices of one joint angle over a time grid.
// `total_residual` is a diagnostic of first-order completeness, the
// total-order minus first-order index per parameter; it is filled only
// on request and stays empty otherwise. An instant where the response
// variance degenerates gets NaN indices and a set `degenerate` flag
// instead of aborting the whole series.
struct SensitivitySeries {
  std::vector<double> times;
  std::vector<std::array<double, 4>> indices;
  std::vector<std::array<double, 4>> total_residual;
  std::vector<std::uint8_t> degenerate;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

// Inversion-method bridge between the unit cube and parameter space:
// forward is the CDF, inverse the quantile function, indexed in the
// kParameterNames order.
struct UnitCubeMap {
  JointParameterDistributions dists;

  double forward(int param, double x) const {
    switch (param) {
      case 0: return dists.cv.cdf(x);
      case 1: return dists.cp.cdf(x);
      case 2: return dists.kv.cdf(x);
      case 3: return dists.q_ini.cdf(x);
      default: throw ConfigError("parameter index out of range");
    }
  }

  double inverse(int param, double u) const {
    switch (param) {
      case 0: return dists.cv.quantile(u);
      case 1: return dists.cp.quantile(u);
      case 2: return dists.kv.quantile(u);
      case 3: return dists.q_ini.quantile(u);
      default: throw ConfigError("parameter index out of range");
    }
  }
};

inline UnitCubeMap to_unit_cube(const JointParameterDistributions& dists) {
  dists.cv.validate();
  dists.cp.validate();
  dists.kv.validate();
  dists.q_ini.validate();
  return UnitCubeMap{dists};
}

// First-order Sobol indices of a model on the k-dimensional unit cube,
// by the Homma-Saltelli pick-freeze estimator: two independent sample
// matrices A and B, and per parameter a matrix C_i equal to B with
// column i taken from A. The mean offset is removed with the product
// f0^2 ~ mean(y_A) mean(y_Ci), which keeps the estimator's noise
// proportional to the variance rather than to the squared mean.
//
// Sample j consumes counters 2kj .. 2kj+2k-1 (A row first, then B row),
// so any partitioning of the sample range reproduces the same draws.
template <typename Model>
std::vector<double> sobol_first_order(Model&& model, int k, std::size_t n,
                                      const RandomStream& stream) {
  if (k < 1) throw ConfigError("sensitivity needs at least one parameter");
  if (n < 1000) throw ConfigError("sensitivity estimation needs n >= 1000");
  const auto dim = static_cast<std::size_t>(k);
  std::vector<double> ua(dim), ub(dim), uc(dim);
  double sum_a = 0.0, sum_aa = 0.0;
  std::vector<double> sum_c(dim, 0.0), sum_ac(dim, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t base = 2 * dim * static_cast<std::uint64_t>(j);
    for (std::size_t d = 0; d < dim; ++d) {
      ua[d] = stream.uniform(base + d);
      ub[d] = stream.uniform(base + dim + d);
    }
    const double ya = model(ua);
    sum_a += ya;
    sum_aa += ya * ya;
    for (std::size_t i = 0; i < dim; ++i) {
      uc = ub;
      uc[i] = ua[i];
      const double yc = model(uc);
      sum_c[i] += yc;
      sum_ac[i] += ya * yc;
    }
  }
  const auto nn = static_cast<double>(n);
  const double mean_a = sum_a / nn;
  const double variance = sum_aa / nn - mean_a * mean_a;
  if (!(variance > 1e-12 * (sum_aa / nn + 1e-300)))
    throw NumericalError("model variance is degenerate; indices undefined");
  std::vector<double> s(dim);
  for (std::size_t i = 0; i < dim; ++i)
    s[i] = (sum_ac[i] / nn - mean_a * (sum_c[i] / nn)) / variance;
  return s;
}

// Time-resolved first-order indices of the creep response with respect
// to (cv, cp, kv, q_ini). The same A and B matrices are reused at every
// instant, which makes each index a smooth function of time; estimator
// noise shifts the whole curve rather than jittering neighboring steps.
inline SensitivitySeries creep_sensitivity_series(
    const JointParameterDistributions& dists, double k,
    const std::vector<double>& times, std::size_t n, std::uint64_t seed,
    std::uint64_t stream_id = 0, bool with_total_order = false) {
  if (times.empty()) throw ConfigError("sensitivity needs a nonempty time grid");
  if (n < 1000) throw ConfigError("sensitivity estimation needs n >= 1000");
  const auto map = to_unit_cube(dists);
  const RandomStream stream(seed, stream_id);

  // Draw both matrices once, already pushed to parameter space.
  std::vector<std::array<double, 4>> pa(n), pb(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t base = 8 * static_cast<std::uint64_t>(j);
    for (int d = 0; d < 4; ++d) {
      pa[j][d] = map.inverse(d, stream.uniform(base + static_cast<std::uint64_t>(d)));
      pb[j][d] =
          map.inverse(d, stream.uniform(base + 4 + static_cast<std::uint64_t>(d)));
    }
  }
  const auto respond = [&](const std::array<double, 4>& p, double t) {
    return step_response(JointViscoelasticity{p[0], p[1], p[2]}, k, p[3], t);
  };

  SensitivitySeries series;
  series.times = times;
  series.indices.resize(times.size());
  if (with_total_order) series.total_residual.resize(times.size());
  series.degenerate.assign(times.size(), 0);
  series.n_samples = n;
  series.seed = seed;
  const auto nn = static_cast<double>(n);
  std::vector<double> ya(n), yb;
  if (with_total_order) yb.resize(n);

  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    double sum_a = 0.0, sum_aa = 0.0, sum_b = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      ya[j] = respond(pa[j], t);
      sum_a += ya[j];
      sum_aa += ya[j] * ya[j];
      if (with_total_order) {
        yb[j] = respond(pb[j], t);
        sum_b += yb[j];
      }
    }
    const double mean_a = sum_a / nn;
    const double variance = sum_aa / nn - mean_a * mean_a;
    if (!(variance > 1e-12 * (sum_aa / nn + 1e-300))) {
      series.degenerate[ti] = 1;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      series.indices[ti].fill(nan);
      if (with_total_order) series.total_residual[ti].fill(nan);
      continue;
    }
    for (int i = 0; i < 4; ++i) {
      double sum_c = 0.0, sum_ac = 0.0, sum_bc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        std::array<double, 4> pc = pb[j];
        pc[i] = pa[j][i];
        const double yc = respond(pc, t);
        sum_c += yc;
        sum_ac += ya[j] * yc;
        if (with_total_order) sum_bc += yb[j] * yc;
      }
      const double first =
          (sum_ac / nn - mean_a * (sum_c / nn)) / variance;
      series.indices[ti][static_cast<std::size_t>(i)] = first;
      if (with_total_order) {
        const double total =
            1.0 - (sum_bc / nn - (sum_b / nn) * (sum_c / nn)) / variance;
        series.total_residual[ti][static_cast<std::size_t>(i)] = total - first;
      }
    }
  }
  return series;
}

}  // namespace softcreep
