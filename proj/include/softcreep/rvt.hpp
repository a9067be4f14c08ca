// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "softcreep/distributions.hpp"
#include "softcreep/errors.hpp"
#include "softcreep/quadrature.hpp"
#include "softcreep/rng.hpp"
#include "softcreep/viscoelastic.hpp"

namespace softcreep {

// Angle density of one joint at a single instant.
struct DensityCurve {
  double time = 0.0;
  std::vector<double> support;  // angle grid (rad)
  std::vector<double> density;  // values (1/rad)
};

// First two moments of one joint angle over a time grid. The standard
// errors are filled only by the Monte-Carlo estimator, which knows its
// own sampling noise; quadrature bands leave them empty.
struct MomentBand {
  std::vector<double> times;
  std::vector<double> expected_value;
  std::vector<double> standard_deviation;
  std::vector<double> ev_standard_error;
  std::vector<double> sd_standard_error;
};

// Creep displacement of the step response with the initial angle removed.
// This is the deterministic part of the map (cv, cp, kv, q_ini) -> q; the
// initial angle enters as a pure shift, so the change-of-variables
// Jacobian of the map is exactly 1.
inline double creep_displacement(const JointViscoelasticity& joint, double k,
                                 double t) {
  return step_response(joint, k, 0.0, t);
}

// Joint density of (cv, cp, kv, q) at time t under a torque step k:
// the product of the three parameter densities with the initial-angle
// density evaluated at q minus the creep displacement. This is the
// integrand whose marginalization over the material parameters yields
// the angle density.
inline double rvt_transformed_density(double cv, double cp, double kv, double q,
                                      double t, double k,
                                      const JointParameterDistributions& dists) {
  const JointViscoelasticity joint{cv, cp, kv};
  joint.validate();
  const double shift = creep_displacement(joint, k, t);
  return dists.cv.pdf(cv) * dists.cp.pdf(cp) * dists.kv.pdf(kv) *
         dists.q_ini.pdf(q - shift);
}

// Tensor-product quadrature discretization of the material-parameter
// space at one instant: each node carries the creep displacement it
// maps to and its probability weight. Weights are normalized to sum to
// one; `mass` records the raw sum as a quadrature health diagnostic.
struct PushforwardNodes {
  std::vector<double> displacement;
  std::vector<double> weight;
  double mass = 0.0;
};

namespace detail {

struct AxisNodes {
  std::vector<double> value;   // parameter values (linear scale)
  std::vector<double> weight;  // quadrature weight times density
};

// Gauss-Legendre nodes for one lognormal axis, placed in log space
// where the density is Gaussian and the integrand is smooth. The axis
// is truncated at the distribution's [cut, 1-cut] quantiles.
inline AxisNodes lognormal_axis_nodes(const LogNormalShape& shape,
                                      const QuadratureSpec& quad) {
  shape.validate();
  quad.validate();
  const double z = normal_quantile(quad.quantile_cut);
  const double lo = shape.mu + shape.sigma * z;
  const double hi = shape.mu - shape.sigma * z;
  const auto rule = gauss_legendre(quad.nodes_per_axis, lo, hi);
  AxisNodes axis;
  axis.value.resize(rule.nodes.size());
  axis.weight.resize(rule.nodes.size());
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double y = rule.nodes[j];
    const double s = (y - shape.mu) / shape.sigma;
    const double density = std::exp(-0.5 * s * s) / (shape.sigma * kSqrt2Pi);
    axis.value[j] = std::exp(y);
    axis.weight[j] = rule.weights[j] * density;
  }
  return axis;
}

}  // namespace detail

inline PushforwardNodes pushforward_nodes(const JointParameterDistributions& dists,
                                          double k, double t,
                                          const QuadratureSpec& quad) {
  const auto cv_axis = detail::lognormal_axis_nodes(dists.cv, quad);
  const auto cp_axis = detail::lognormal_axis_nodes(dists.cp, quad);
  const auto kv_axis = detail::lognormal_axis_nodes(dists.kv, quad);
  const std::size_t n = cv_axis.value.size();
  PushforwardNodes nodes;
  nodes.displacement.reserve(n * n * n);
  nodes.weight.reserve(n * n * n);
  double mass = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double wab = cv_axis.weight[a] * cp_axis.weight[b];
      for (std::size_t c = 0; c < n; ++c) {
        const JointViscoelasticity joint{cv_axis.value[a], cp_axis.value[b],
                                         kv_axis.value[c]};
        const double w = wab * kv_axis.weight[c];
        nodes.displacement.push_back(creep_displacement(joint, k, t));
        nodes.weight.push_back(w);
        mass += w;
      }
    }
  }
  nodes.mass = mass;
  if (!(std::abs(mass - 1.0) <= 1e-2))
    throw NumericalError(
        "parameter quadrature mass " + std::to_string(mass) +
        " deviates from 1 by more than 1e-2 with " +
        std::to_string(quad.nodes_per_axis) +
        " nodes per axis; increase nodes_per_axis or relax quantile_cut");
  for (auto& w : nodes.weight) w /= mass;
  return nodes;
}

namespace detail {

// Probability mass of the pushforward falling outside [lo, hi].
inline double tail_mass_outside(const PushforwardNodes& nodes,
                                const NormalShape& q_ini, double lo, double hi) {
  double outside = 0.0;
  for (std::size_t j = 0; j < nodes.displacement.size(); ++j) {
    const double mu = nodes.displacement[j] + q_ini.mean;
    outside += nodes.weight[j] * (normal_cdf((lo - mu) / q_ini.sd) +
                                  normal_cdf((mu - hi) / q_ini.sd));
  }
  return outside;
}

}  // namespace detail

// Marginal angle density at time t for one joint under torque step k,
// by quadrature over the three material parameters. The grid is used
// as given when it carries essentially all of the probability mass;
// otherwise it is regrown as a uniform grid (same point count) over a
// range wide enough to hold the distribution.
inline DensityCurve marginal_pdf(double t, double k,
                                 const JointParameterDistributions& dists,
                                 const std::vector<double>& grid,
                                 const QuadratureSpec& quad) {
  if (grid.size() < 2) throw ConfigError("angle grid needs at least two points");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw ConfigError("angle grid must be ascending");
  dists.q_ini.validate();
  const auto nodes = pushforward_nodes(dists, k, t, quad);

  DensityCurve curve;
  curve.time = t;
  curve.support = grid;
  if (detail::tail_mass_outside(nodes, dists.q_ini, grid.front(), grid.back()) >
      1e-3) {
    double lo = nodes.displacement.front();
    double hi = lo;
    for (double d : nodes.displacement) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    lo += dists.q_ini.mean - 8.0 * dists.q_ini.sd;
    hi += dists.q_ini.mean + 8.0 * dists.q_ini.sd;
    lo = std::min(lo, grid.front());
    hi = std::max(hi, grid.back());
    const std::size_t n = grid.size();
    for (std::size_t j = 0; j < n; ++j)
      curve.support[j] =
          lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n - 1);
  }

  curve.density.assign(curve.support.size(), 0.0);
  const double inv_var2 = 1.0 / (2.0 * dists.q_ini.sd * dists.q_ini.sd);
  const double norm = 1.0 / (dists.q_ini.sd * kSqrt2Pi);
  for (std::size_t j = 0; j < nodes.displacement.size(); ++j) {
    const double mu = nodes.displacement[j] + dists.q_ini.mean;
    const double w = nodes.weight[j] * norm;
    for (std::size_t g = 0; g < curve.support.size(); ++g) {
      const double d = curve.support[g] - mu;
      curve.density[g] += w * std::exp(-d * d * inv_var2);
    }
  }
  return curve;
}

// Monte-Carlo sampling of the joint angle at a set of instants: draws n
// parameter tuples and evaluates the step response at every time.
// Sample i consumes counters 4i..4i+3, so partitioning the index range
// across workers cannot change the result. Returns one sample vector
// per requested time.
inline std::vector<std::vector<double>> mc_sample_trajectories(
    const JointParameterDistributions& dists, double k,
    const std::vector<double>& times, std::size_t n, const RandomStream& stream) {
  if (n < 1) throw ConfigError("Monte-Carlo sampling needs n >= 1");
  std::vector<std::vector<double>> out(times.size());
  for (auto& column : out) column.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t base = 4 * static_cast<std::uint64_t>(i);
    const JointViscoelasticity joint{dists.cv.sample(stream, base),
                                     dists.cp.sample(stream, base + 1),
                                     dists.kv.sample(stream, base + 2)};
    const double q0 = dists.q_ini.sample(stream, base + 3);
    for (std::size_t j = 0; j < times.size(); ++j)
      out[j][i] = step_response(joint, k, q0, times[j]);
  }
  return out;
}

// Uniform angle grid spanning the central quantile range of a small
// Monte-Carlo pilot at time t. The range covers [1e-4, 1-1e-4] of the
// pilot samples, which is ample for plotting and for the trapezoid
// normalization checks.
inline std::vector<double> pilot_q_grid(const JointParameterDistributions& dists,
                                        double k, double t,
                                        const RandomStream& stream,
                                        std::size_t n_pilot = 4096,
                                        std::size_t n_points = 512) {
  if (n_pilot < 2 || n_points < 2)
    throw ConfigError("pilot grid needs at least two samples and two points");
  auto samples = mc_sample_trajectories(dists, k, {t}, n_pilot, stream).front();
  std::sort(samples.begin(), samples.end());
  const auto quantile = [&](double p) {
    const double idx = p * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double f = idx - static_cast<double>(lo);
    return (1.0 - f) * samples[lo] + f * samples[hi];
  };
  const double lo = quantile(1e-4);
  const double hi = quantile(1.0 - 1e-4);
  if (!(hi > lo)) throw NumericalError("pilot sample range is degenerate");
  std::vector<double> grid(n_points);
  for (std::size_t j = 0; j < n_points; ++j)
    grid[j] =
        lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n_points - 1);
  return grid;
}

// Expected value and standard deviation of the joint angle over a time
// grid, from the quadrature pushforward. The angle is the sum of the
// creep displacement and the independent initial angle, so the variance
// splits into the displacement variance plus the initial-angle variance.
inline MomentBand moment_band(const std::vector<double>& times, double k,
                              const JointParameterDistributions& dists,
                              const QuadratureSpec& quad) {
  dists.q_ini.validate();
  MomentBand band;
  band.times = times;
  band.expected_value.resize(times.size());
  band.standard_deviation.resize(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto nodes = pushforward_nodes(dists, k, times[j], quad);
    double mean_disp = 0.0;
    for (std::size_t a = 0; a < nodes.displacement.size(); ++a)
      mean_disp += nodes.weight[a] * nodes.displacement[a];
    double var_disp = 0.0;
    for (std::size_t a = 0; a < nodes.displacement.size(); ++a) {
      const double d = nodes.displacement[a] - mean_disp;
      var_disp += nodes.weight[a] * d * d;
    }
    band.expected_value[j] = mean_disp + dists.q_ini.mean;
    band.standard_deviation[j] =
        std::sqrt(var_disp + dists.q_ini.sd * dists.q_ini.sd);
  }
  return band;
}

// Monte-Carlo counterpart of moment_band, sharing the counter layout of
// mc_sample_trajectories.
inline MomentBand moment_band_mc(const std::vector<double>& times, double k,
                                 const JointParameterDistributions& dists,
                                 std::size_t n, const RandomStream& stream) {
  const auto samples = mc_sample_trajectories(dists, k, times, n, stream);
  MomentBand band;
  band.times = times;
  band.expected_value.resize(times.size());
  band.standard_deviation.resize(times.size());
  band.ev_standard_error.resize(times.size());
  band.sd_standard_error.resize(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    double mean = 0.0;
    for (double v : samples[j]) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    double m4 = 0.0;
    for (double v : samples[j]) {
      const double d2 = (v - mean) * (v - mean);
      var += d2;
      m4 += d2 * d2;
    }
    var /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    band.expected_value[j] = mean;
    band.standard_deviation[j] = sd;
    band.ev_standard_error[j] = sd / std::sqrt(static_cast<double>(n));
    // Delta method on Var(s^2) = (m4 - s^4)/n. For heavy-tailed angles
    // the fourth moment dominates and the estimate is honest about how
    // little n samples pin the standard deviation down.
    const double var_of_var =
        std::max(m4 - var * var, 0.0) / static_cast<double>(n);
    band.sd_standard_error[j] = sd > 0.0 ? std::sqrt(var_of_var) / (2.0 * sd) : 0.0;
  }
  return band;
}

// Cross-check of the two moment paths, at four standard errors of the
// Monte-Carlo estimates: a comfortably rare false alarm while still
// catching real divergence. The standard errors come from the sample
// itself when available (moment_band_mc fills them); the Gaussian
// fallback sd/sqrt(2n) for the deviation is far too tight for
// heavy-tailed angles, whose fourth moment dwarfs 2 sd^4.
inline void check_moment_agreement(const MomentBand& quadrature,
                                   const MomentBand& monte_carlo, std::size_t n) {
  if (quadrature.times.size() != monte_carlo.times.size())
    throw ConfigError("moment bands cover different time grids");
  const double root_n = std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < quadrature.times.size(); ++j) {
    const double sd = monte_carlo.standard_deviation[j];
    const double ev_se = monte_carlo.ev_standard_error.empty()
                             ? sd / root_n
                             : monte_carlo.ev_standard_error[j];
    const double sd_se = monte_carlo.sd_standard_error.empty()
                             ? sd / std::sqrt(2.0 * static_cast<double>(n))
                             : monte_carlo.sd_standard_error[j];
    const double ev_tol = 4.0 * ev_se + 1e-12;
    const double sd_tol = 4.0 * sd_se + 1e-12;
    if (std::abs(quadrature.expected_value[j] - monte_carlo.expected_value[j]) >
        ev_tol)
      throw NumericalError("moment methods disagree on EV at t = " +
                           std::to_string(quadrature.times[j]));
    if (std::abs(quadrature.standard_deviation[j] - sd) > sd_tol)
      throw NumericalError("moment methods disagree on SD at t = " +
                           std::to_string(quadrature.times[j]));
  }
}

// Gaussian kernel density estimate with Silverman's bandwidth, used as
// the Monte-Carlo oracle against marginal_pdf. Evaluation truncates the
// kernel at eight bandwidths, which changes the value by less than
// 1e-14 of the peak.
struct KernelDensityEstimate {
  std::vector<double> samples;  // ascending
  double bandwidth = 0.0;

  double pdf(double x) const {
    const auto lo =
        std::lower_bound(samples.begin(), samples.end(), x - 8.0 * bandwidth);
    const auto hi =
        std::upper_bound(samples.begin(), samples.end(), x + 8.0 * bandwidth);
    double sum = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const double u = (x - *it) / bandwidth;
      sum += std::exp(-0.5 * u * u);
    }
    return sum / (static_cast<double>(samples.size()) * bandwidth * kSqrt2Pi);
  }
};

inline KernelDensityEstimate make_kde(std::vector<double> samples) {
  if (samples.size() < 2) throw DataError("kernel density needs at least two samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= n;
  const double sd = std::sqrt(var);
  const double q1 = samples[static_cast<std::size_t>(0.25 * (n - 1))];
  const double q3 = samples[static_cast<std::size_t>(0.75 * (n - 1))];
  const double spread = std::min(sd, (q3 - q1) / 1.34);
  const double h = 0.9 * spread * std::pow(n, -0.2);
  if (!(h > 0.0)) throw NumericalError("kernel bandwidth is degenerate");
  return KernelDensityEstimate{std::move(samples), h};
}

}  // namespace softcreep
