// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "softcreep/errors.hpp"
#include "softcreep/rng.hpp"

namespace softcreep {

inline constexpr double kSqrt2Pi = 2.506628274631000502415765284811;
inline constexpr double kInvSqrt2 = 0.70710678118654752440084436210;

// Standard normal cdf via the complementary error function; accurate in
// both tails.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

// Standard normal quantile, Wichura's algorithm AS 241 (PPND16 constants).
// Relative accuracy around 1e-15 over the full open interval.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -v : v;
}

// Normal distribution with explicit location and scale, used for the
// initial joint angle.
struct NormalShape {
  double mean = 0.0;  // rad
  double sd = 1.0;    // rad

  void validate() const {
    if (!(std::isfinite(mean) && std::isfinite(sd) && sd > 0.0))
      throw std::invalid_argument("NormalShape: sd must be finite and > 0");
  }

  double pdf(double x) const {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * kSqrt2Pi);
  }

  double cdf(double x) const { return normal_cdf((x - mean) / sd); }

  double quantile(double u) const { return mean + sd * normal_quantile(u); }

  double sample(const RandomStream& rs, std::uint64_t counter) const {
    return quantile(rs.uniform(counter));
  }
};

// Log-normal shape in the (sigma, mu) convention: log x ~ N(mu, sigma^2).
struct LogNormalShape {
  double sigma = 1.0;  // shape, spread of log x
  double mu = 0.0;     // log-scale location

  void validate() const {
    if (!(std::isfinite(sigma) && std::isfinite(mu) && sigma > 0.0))
      throw std::invalid_argument("LogNormalShape: sigma must be finite and > 0");
  }

  // Density is identically zero on x <= 0.
  double pdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    const double z = (std::log(x) - mu) / sigma;
    return std::exp(-0.5 * z * z) / (x * sigma * kSqrt2Pi);
  }

  double cdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    return normal_cdf((std::log(x) - mu) / sigma);
  }

  double quantile(double u) const { return std::exp(mu + sigma * normal_quantile(u)); }

  double median() const { return std::exp(mu); }
  double mode() const { return std::exp(mu - sigma * sigma); }

  double sample(const RandomStream& rs, std::uint64_t counter) const {
    return quantile(rs.uniform(counter));
  }
};

// Parameter distributions of one viscoelastic joint.
struct JointParameterDistributions {
  LogNormalShape cv;   // parallel damping, N m s/rad
  LogNormalShape cp;   // series damping, N m s/rad
  LogNormalShape kv;   // parallel stiffness, N m/rad
  NormalShape q_ini;   // initial joint angle, rad

  void validate() const {
    cv.validate();
    cp.validate();
    kv.validate();
    q_ini.validate();
  }
};

using ParameterDistributions = std::array<JointParameterDistributions, 3>;

}  // namespace softcreep
