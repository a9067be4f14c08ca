// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace softcreep {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // sum to 2
};

// Nodes are the roots of the Legendre polynomial P_n, found by Newton
// iteration from the Chebyshev-like initial guess. Exact for polynomials
// of degree 2n - 1.
inline GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // evaluate P_n and its derivative by the three-term recurrence
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;  // symmetric rule, exact center
  return rule;
}

// The same rule affinely mapped to [a, b].
inline GaussLegendreRule gauss_legendre(int n, double a, double b) {
  GaussLegendreRule rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b), haf = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + haf * rule.nodes[i];
    rule.weights[i] *= haf;
  }
  return rule;
}

// Settings for the truncated tensor-product rule over the three log-normal
// parameter axes.
struct QuadratureSpec {
  int nodes_per_axis = 48;
  double quantile_cut = 1e-6;  // each axis spans [cut, 1 - cut] quantiles

  void validate() const {
    if (nodes_per_axis < 1)
      throw std::invalid_argument("QuadratureSpec: nodes_per_axis must be >= 1");
    if (!(quantile_cut > 0.0 && quantile_cut < 0.5))
      throw std::invalid_argument("QuadratureSpec: quantile_cut must lie in (0, 0.5)");
  }
};

}  // namespace softcreep
