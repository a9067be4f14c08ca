// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end walkthrough of the library: analytic creep of one joint,
// density push-forward of the parameter uncertainty, time-resolved
// sensitivity indices, and a small estimation round trip. Sizes are cut
// down so the whole program finishes in a few seconds; the command-line
// tool runs the same pipeline at production scale.

#include <cstdio>
#include <vector>

#include <softcreep/softcreep.hpp>

using namespace softcreep;

int main() {
  const auto dists = canonical_distributions();
  const auto& joint = dists[0];
  const double torque = 0.01;

  // Median parameters and their analytic step response. The transient
  // settles at K/kv above the initial angle; the cp damper then creeps
  // on at a constant K/cp rate.
  const JointViscoelasticity median{joint.cv.median(), joint.cp.median(),
                                    joint.kv.median()};
  std::printf("median parameters: cv = %.4f, cp = %.4f, kv = %.4f\n", median.cv,
              median.cp, median.kv);
  for (double t : {0.0, 1.0, 10.0, 30.0})
    std::printf("  q(%5.1f s) = %.4f rad\n", t,
                step_response(median, torque, 0.2, t));

  // Push the parameter distributions through the response map and follow
  // the angle density over time.
  const QuadratureSpec quad{24, 1e-6};
  const RandomStream stream(42, 0);
  std::printf("\nangle density (quadrature push-forward):\n");
  for (double t : {0.0, 10.0, 30.0}) {
    const auto grid = pilot_q_grid(joint, torque, t, stream.derive(1), 2048, 257);
    const auto curve = marginal_pdf(t, torque, joint, grid, quad);
    double peak = 0.0;
    double at = 0.0;
    for (std::size_t i = 0; i < curve.support.size(); ++i) {
      if (curve.density[i] > peak) {
        peak = curve.density[i];
        at = curve.support[i];
      }
    }
    std::printf("  t = %4.1f s: peak %.2f 1/rad at q = %.3f rad\n", t, peak, at);
  }
  const std::vector<double> band_times{0.0, 10.0, 20.0, 30.0};
  const auto band = moment_band(band_times, torque, joint, quad);
  std::printf("expected angle and spread:\n");
  for (std::size_t i = 0; i < band.times.size(); ++i)
    std::printf("  t = %4.1f s: EV = %.4f rad, SD = %.4f rad\n", band.times[i],
                band.expected_value[i], band.standard_deviation[i]);

  // First-order sensitivity of the angle to each parameter over time.
  const std::vector<double> sens_times{0.0, 1.0, 5.0, 15.0, 30.0};
  const auto series = creep_sensitivity_series(joint, torque, sens_times, 20000, 42);
  std::printf("\nfirst-order sensitivity indices:\n");
  std::printf("  %6s %8s %8s %8s %8s\n", "t (s)", kParameterNames[0],
              kParameterNames[1], kParameterNames[2], kParameterNames[3]);
  for (std::size_t i = 0; i < series.times.size(); ++i)
    std::printf("  %6.1f %8.3f %8.3f %8.3f %8.3f\n", series.times[i],
                series.indices[i][0], series.indices[i][1], series.indices[i][2],
                series.indices[i][3]);

  // Round trip: synthesize noisy trials from the canonical shapes and
  // estimate the shapes back from the recordings.
  TrialSet set;
  set.torque_step = {torque, torque, torque};
  for (std::uint64_t n = 0; n < 30; ++n) {
    const RandomStream trial_stream(7, n);
    const auto params = sample_trial_params(dists, trial_stream.derive(0));
    set.trials.push_back(synthesize_trial(params, set.torque_step, 30.0, 30.0,
                                          1e-3, trial_stream.derive(1)));
  }
  const auto summary = estimate_distributions(set);
  std::printf("\nestimated joint-1 shapes from 30 synthetic trials:\n");
  std::printf("  cv: sigma %.3f (true %.3f), mu %.3f (true %.3f)\n",
              summary.dists[0].cv.sigma, joint.cv.sigma, summary.dists[0].cv.mu,
              joint.cv.mu);
  std::printf("  cp: sigma %.3f (true %.3f), mu %.3f (true %.3f)\n",
              summary.dists[0].cp.sigma, joint.cp.sigma, summary.dists[0].cp.mu,
              joint.cp.mu);
  std::printf("  kv: sigma %.3f (true %.3f), mu %.3f (true %.3f)\n",
              summary.dists[0].kv.sigma, joint.kv.sigma, summary.dists[0].kv.mu,
              joint.kv.mu);
  return 0;
}
