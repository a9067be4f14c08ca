// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <softcreep/estimation.hpp>

using namespace softcreep;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

JointViscoelasticity median_joint() {
  return {std::exp(-3.6635), std::exp(2.8538), std::exp(-2.4441)};
}

ParameterDistributions reference_dists() {
  JointParameterDistributions d;
  d.cv = {0.5232, -3.6635};
  d.cp = {0.7011, 2.8538};
  d.kv = {0.1973, -2.4441};
  d.q_ini = {0.2, 0.03};
  return {d, d, d};
}

Trajectory clean_trial(const JointViscoelasticity& j, double k, double q_ini,
                       double t_end = 30.0, double rate = 30.0) {
  TrialParams p;
  p.joints = {j, j, j};
  p.q_ini = {q_ini, q_ini, q_ini};
  return synthesize_trial(p, {k, k, k}, t_end, rate, 0.0,
                          RandomStream(0, 0));
}

}  // namespace

TEST_CASE("synthetic trial grid and noiseless values") {
  const auto j = median_joint();
  const auto trial = clean_trial(j, 0.01, 0.2);
  REQUIRE(trial.t.size() == 901);
  CHECK(trial.t.front() == 0.0);
  CHECK_THAT(trial.t.back(), WithinAbs(30.0, 1e-12));
  for (std::size_t s = 0; s < trial.t.size(); s += 97) {
    const double ref = step_response(j, 0.01, 0.2, trial.t[s]);
    CHECK(trial.q[s][0] == ref);
    CHECK(trial.q[s][2] == ref);
    CHECK(trial.tau[s][1] == 0.01);
  }
  CHECK_THROWS_AS(synthesize_trial(TrialParams{}, {0, 0, 0}, 0.0, 30.0, 0.0,
                                   RandomStream(0, 0)),
                  ConfigError);
  CHECK_THROWS_AS(synthesize_trial(TrialParams{}, {0, 0, 0}, 1.0, 30.0, -1.0,
                                   RandomStream(0, 0)),
                  ConfigError);
}

TEST_CASE("noiseless fit recovers the generating parameters") {
  const auto j = median_joint();
  const auto trial = clean_trial(j, 0.01, 0.2);
  std::vector<double> y(trial.q.size());
  for (std::size_t s = 0; s < y.size(); ++s) y[s] = trial.q[s][0];
  const auto fit = fit_creep_joint(trial.t, y, 0.01);
  REQUIRE(fit.ok);
  CHECK_THAT(fit.params.cv, WithinRel(j.cv, 1e-6));
  CHECK_THAT(fit.params.cp, WithinRel(j.cp, 1e-6));
  CHECK_THAT(fit.params.kv, WithinRel(j.kv, 1e-6));
  CHECK_THAT(fit.q_ini, WithinAbs(0.2, 1e-8));
  CHECK(fit.sse < 1e-16);
}

TEST_CASE("noisy fit stays close") {
  const auto j = median_joint();
  TrialParams p;
  p.joints = {j, j, j};
  p.q_ini = {0.2, 0.2, 0.2};
  const auto trial =
      synthesize_trial(p, {0.01, 0.01, 0.01}, 30.0, 30.0, 1e-3,
                       RandomStream(99, 1));
  std::vector<double> y(trial.q.size());
  for (std::size_t s = 0; s < y.size(); ++s) y[s] = trial.q[s][1];
  const auto fit = fit_creep_joint(trial.t, y, 0.01);
  REQUIRE(fit.ok);
  CHECK_THAT(fit.params.cv, WithinRel(j.cv, 0.15));
  CHECK_THAT(fit.params.cp, WithinRel(j.cp, 0.15));
  CHECK_THAT(fit.params.kv, WithinRel(j.kv, 0.15));
  CHECK_THAT(fit.q_ini, WithinAbs(0.2, 0.005));
}

TEST_CASE("negative torque steps are mirrored") {
  const auto j = median_joint();
  TrialParams p;
  p.joints = {j, j, j};
  p.q_ini = {0.2, 0.2, 0.2};
  const auto trial = synthesize_trial(p, {-0.01, -0.01, -0.01}, 30.0, 30.0,
                                      0.0, RandomStream(0, 0));
  std::vector<double> y(trial.q.size());
  for (std::size_t s = 0; s < y.size(); ++s) y[s] = trial.q[s][0];
  CHECK(y.back() < y.front());  // creeping away from the offset
  const auto fit = fit_creep_joint(trial.t, y, -0.01);
  REQUIRE(fit.ok);
  CHECK_THAT(fit.params.cv, WithinRel(j.cv, 1e-6));
  CHECK_THAT(fit.params.cp, WithinRel(j.cp, 1e-6));
  CHECK_THAT(fit.params.kv, WithinRel(j.kv, 1e-6));
  CHECK_THAT(fit.q_ini, WithinAbs(0.2, 1e-8));
}

TEST_CASE("fit failure modes are reported, not thrown") {
  const std::vector<double> t{0.0, 1.0, 2.0};
  const std::vector<double> y{0.0, 0.1, 0.2};
  auto fit = fit_creep_joint(t, y, 0.01);
  CHECK(!fit.ok);
  CHECK(fit.message == "too few samples");

  const auto trial = clean_trial(median_joint(), 0.01, 0.2);
  std::vector<double> yy(trial.q.size());
  for (std::size_t s = 0; s < yy.size(); ++s) yy[s] = trial.q[s][0];
  fit = fit_creep_joint(trial.t, yy, 0.0);
  CHECK(!fit.ok);
  CHECK(fit.message == "zero torque step");

  yy[17] = std::numeric_limits<double>::quiet_NaN();
  fit = fit_creep_joint(trial.t, yy, 0.01);
  CHECK(!fit.ok);
  CHECK(fit.message == "non-finite sample");
}

TEST_CASE("outlier screen removes planted contamination") {
  const LogNormalShape inlier_shape{0.2, -3.6635};
  const RandomStream rs(4242, 0);
  std::vector<double> samples;
  for (int k = 0; k < 100; ++k)
    samples.push_back(inlier_shape.sample(rs, static_cast<std::uint64_t>(k)));
  const double max_inlier = *std::max_element(samples.begin(), samples.end());
  for (int k = 0; k < 10; ++k) samples[k * 10] *= 50.0;

  const auto kept = reject_outliers(samples);
  CHECK(std::is_sorted(kept.begin(), kept.end()));
  // All ten planted points removed, at most two true samples lost.
  CHECK(kept.back() <= max_inlier);
  CHECK(kept.size() >= 88);

  // The screen is a fixpoint: rerunning it changes nothing.
  const auto again = reject_outliers(kept);
  REQUIRE(again.size() == kept.size());
  for (std::size_t s = 0; s < kept.size(); ++s) CHECK(again[s] == kept[s]);
}

TEST_CASE("outlier screen input hygiene") {
  CHECK_THROWS_AS(reject_outliers({}), DataError);
  CHECK_THROWS_AS(reject_outliers({-1.0, -2.0, 0.0}), DataError);
  // Non-positive entries are dropped before screening.
  const auto kept = reject_outliers({1.0, -5.0, 1.1, 0.9, 0.0, 1.05});
  CHECK(kept.size() == 4);
  CHECK(kept.front() == 0.9);
  // A constant sample has zero spread and survives whole.
  CHECK(reject_outliers({2.0, 2.0, 2.0}).size() == 3);
}

TEST_CASE("symmetric screen handles signed samples") {
  const NormalShape shape{0.2, 0.03};
  const RandomStream rs(17, 3);
  std::vector<double> samples;
  for (int k = 0; k < 80; ++k)
    samples.push_back(shape.sample(rs, static_cast<std::uint64_t>(k)));
  samples.push_back(5.0);
  samples.push_back(-4.0);
  const auto kept = reject_outliers_symmetric(samples);
  CHECK(std::is_sorted(kept.begin(), kept.end()));
  CHECK(kept.size() >= 78);
  CHECK(kept.back() < 1.0);
  CHECK(kept.front() > -1.0);
  CHECK_THROWS_AS(reject_outliers_symmetric({}), DataError);
}

TEST_CASE("moment fits against hand-computed samples") {
  const double e = std::exp(1.0);
  const auto ln = fit_lognormal({1.0, e, e * e});
  CHECK_THAT(ln.mu, WithinAbs(1.0, 1e-15));
  CHECK_THAT(ln.sigma, WithinAbs(std::sqrt(2.0 / 3.0), 1e-15));

  const auto n = fit_normal({1.0, 2.0, 3.0});
  CHECK_THAT(n.mean, WithinAbs(2.0, 1e-15));
  CHECK_THAT(n.sd, WithinAbs(std::sqrt(2.0 / 3.0), 1e-15));

  CHECK_THROWS_AS(fit_lognormal({1.0}), DataError);
  CHECK_THROWS_AS(fit_lognormal({1.0, -1.0}), DataError);
  CHECK_THROWS_AS(fit_lognormal({2.0, 2.0}), DataError);
  CHECK_THROWS_AS(fit_normal({1.0}), DataError);
  CHECK_THROWS_AS(fit_normal({3.0, 3.0}), DataError);
}

TEST_CASE("moment fits ignore sample order") {
  const std::vector<double> sorted{0.5, 0.7, 1.1, 1.9, 2.3};
  const std::vector<double> shuffled{1.9, 0.5, 2.3, 1.1, 0.7};
  const auto a = fit_lognormal(sorted);
  const auto b = fit_lognormal(shuffled);
  CHECK(a.mu == b.mu);
  CHECK(a.sigma == b.sigma);
  const auto ka = reject_outliers(sorted);
  const auto kb = reject_outliers(shuffled);
  REQUIRE(ka.size() == kb.size());
  for (std::size_t s = 0; s < ka.size(); ++s) CHECK(ka[s] == kb[s]);
}

TEST_CASE("batch estimation round-trips the generating distributions") {
  const auto truth = reference_dists();
  TrialSet data;
  data.torque_step = {0.01, 0.01, 0.01};
  const std::uint64_t seed = 7;
  for (int n = 0; n < 20; ++n) {
    const RandomStream trial_stream(seed, static_cast<std::uint64_t>(n));
    const auto params = sample_trial_params(truth, trial_stream.derive(0));
    data.trials.push_back(synthesize_trial(params, data.torque_step, 30.0,
                                           30.0, 1e-3, trial_stream.derive(1)));
  }
  const auto summary = estimate_distributions(data);
  CHECK(summary.trials_used == std::array<int, 3>{20, 20, 20});
  for (int i = 0; i < 3; ++i) {
    // Loose bands: 20 trials only pin the shapes to a few tenths in mu.
    CHECK_THAT(summary.dists[i].cv.mu, WithinAbs(truth[i].cv.mu, 0.6));
    CHECK_THAT(summary.dists[i].cp.mu, WithinAbs(truth[i].cp.mu, 0.6));
    CHECK_THAT(summary.dists[i].kv.mu, WithinAbs(truth[i].kv.mu, 0.6));
    CHECK_THAT(summary.dists[i].q_ini.mean, WithinAbs(0.2, 0.03));
    CHECK(summary.dists[i].cv.sigma < 2.0);
    for (int p = 0; p < 4; ++p) {
      CHECK(summary.kept[i][p] >= 16);
      CHECK(static_cast<int>(summary.samples[i][p].size()) ==
            summary.kept[i][p]);
    }
  }

  // Trial order cannot matter: pools are sorted before screening.
  TrialSet reversed;
  reversed.torque_step = data.torque_step;
  reversed.trials.assign(data.trials.rbegin(), data.trials.rend());
  const auto again = estimate_distributions(reversed);
  for (int i = 0; i < 3; ++i) {
    CHECK(again.dists[i].cv.mu == summary.dists[i].cv.mu);
    CHECK(again.dists[i].cv.sigma == summary.dists[i].cv.sigma);
    CHECK(again.dists[i].q_ini.mean == summary.dists[i].q_ini.mean);
  }
}

TEST_CASE("batch estimation needs at least two usable trials per joint") {
  TrialSet data;
  CHECK_THROWS_AS(estimate_distributions(data), DataError);
  data.torque_step = {0.01, 0.01, 0.01};
  data.trials.push_back(clean_trial(median_joint(), 0.01, 0.2));
  CHECK_THROWS_WITH(estimate_distributions(data),
                    ContainsSubstring("not enough successful fits"));
}
