// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <softcreep/simulate.hpp>

using namespace softcreep;
using Catch::Matchers::WithinAbs;

namespace {

std::array<JointViscoelasticity, 3> median_joints() {
  const JointViscoelasticity j{std::exp(-3.6635), std::exp(2.8538),
                               std::exp(-2.4441)};
  return {j, j, j};
}

}  // namespace

TEST_CASE("quasi-static matches the closed-form step response") {
  const auto joints = median_joints();
  const Vec3 q_init{0.2, 0.15, 0.1};
  const double k = 0.01;
  const auto traj = simulate_quasi_static(
      joints, [&](double) { return Vec3{k, k, k}; }, q_init, 30.0, 1e-3);
  REQUIRE(traj.t.size() == 30001);
  CHECK(traj.t.front() == 0.0);
  CHECK(traj.t.back() == 30.0);
  double worst = 0.0;
  for (std::size_t s = 0; s < traj.t.size(); s += 10) {
    for (int i = 0; i < 3; ++i) {
      const double ref = step_response(joints[i], k, q_init[i], traj.t[s]);
      worst = std::max(worst, std::abs(traj.q[s][i] - ref));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("quasi-static under zero torque stays put") {
  const auto joints = median_joints();
  const Vec3 q_init{0.3, -0.1, 0.0};
  const auto traj = simulate_quasi_static(
      joints, [](double) { return Vec3{}; }, q_init, 1.0, 1e-3);
  for (const auto& q : traj.q)
    for (int i = 0; i < 3; ++i) CHECK(q[i] == q_init[i]);
}

TEST_CASE("quasi-static handles a time-varying torque") {
  // Ramp loading tau = c t exercises the stage times inside RK4; a constant
  // torque would mask a wrong time argument. Analytic solution per joint:
  //   qv = (c/kv) (t - (cv/kv)(1 - exp(-kv t / cv))),  qp = c t^2 / (2 cp).
  const auto joints = median_joints();
  const double c = 0.002;
  const auto traj = simulate_quasi_static(
      joints, [&](double t) { return Vec3{c * t, c * t, c * t}; },
      Vec3{}, 10.0, 1e-3);
  const auto& j = joints[0];
  for (std::size_t s = 0; s < traj.t.size(); s += 500) {
    const double t = traj.t[s];
    const double tr = j.cv / j.kv;
    const double qv = (c / j.kv) * (t - tr * (1.0 - std::exp(-t / tr)));
    const double qp = c * t * t / (2.0 * j.cp);
    CHECK_THAT(traj.q[s][0], WithinAbs(qv + qp, 1e-9));
  }
}

TEST_CASE("time grid validation") {
  const auto joints = median_joints();
  auto zero = [](double) { return Vec3{}; };
  CHECK_THROWS_AS(simulate_quasi_static(joints, zero, Vec3{}, 0.0, 1e-3),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_quasi_static(joints, zero, Vec3{}, 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_quasi_static(joints, zero, Vec3{}, 1.0, 2.0),
                  std::invalid_argument);
}

TEST_CASE("full dynamics at rest under zero torque stays at rest") {
  const FingerGeometry geom{};
  const auto joints = median_joints();
  const Vec3 q_init{0.25, 0.1, -0.05};
  const double dt = suggest_full_dt(geom, joints, q_init);
  REQUIRE(dt > 0.0);
  const auto traj = simulate_full_torque(
      geom, joints, [](double) { return Vec3{}; }, q_init, 200 * dt, dt);
  for (int i = 0; i < 3; ++i)
    CHECK_THAT(traj.q.back()[i], WithinAbs(q_init[i], 1e-15));
}

TEST_CASE("full dynamics converges to quasi-static at gram scale") {
  const FingerGeometry geom{};
  const auto joints = median_joints();
  const Vec3 q_init{0.2, 0.2, 0.2};
  const double k = 0.01;

  // Integrate with the suggested stable step, rounded so the 1 ms record
  // grid is an exact multiple.
  const double record_dt = 1e-3;
  const auto n_sub =
      static_cast<int>(std::ceil(record_dt / suggest_full_dt(geom, joints, q_init)));
  const double dt = record_dt / n_sub;
  const auto traj = simulate_full_torque(
      geom, joints, [&](double) { return Vec3{k, k, k}; }, q_init, 0.5, dt,
      record_dt);
  REQUIRE(traj.t.size() == 501);

  double worst = 0.0;
  for (std::size_t s = 0; s < traj.t.size(); ++s) {
    if (traj.t[s] < 0.1) continue;
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, std::abs(traj.q[s][i] -
                                       step_response(joints[i], k, q_init[i],
                                                     traj.t[s])));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("full dynamics diverges loudly when the step is unstable") {
  const FingerGeometry geom{};
  const auto joints = median_joints();
  // A constant torque excites the stiff damping mode; at this step size
  // RK4 is far outside its stability region.
  CHECK_THROWS_AS(
      simulate_full_torque(geom, joints,
                           [](double) { return Vec3{0.01, 0.01, 0.01}; },
                           Vec3{0.1, 0.1, 0.1}, 1.0, 0.01),
      NumericalError);
}

TEST_CASE("record stride thins the stored samples") {
  const FingerGeometry geom{};
  const auto joints = median_joints();
  const auto traj = simulate_full_torque(
      geom, joints, [](double) { return Vec3{}; }, Vec3{}, 0.01, 1e-5, 1e-3);
  REQUIRE(traj.t.size() == 11);
  for (std::size_t s = 0; s < traj.t.size(); ++s)
    CHECK_THAT(traj.t[s], WithinAbs(1e-3 * static_cast<double>(s), 1e-12));
  CHECK_THROWS_AS(
      simulate_full_torque(geom, joints, [](double) { return Vec3{}; }, Vec3{},
                           0.01, 1e-5, 1.5e-5),
      ConfigError);
}

TEST_CASE("wire tension bends the finger forward") {
  const FingerGeometry geom{};
  const auto joints = median_joints();
  const double dt = suggest_full_dt(geom, joints, Vec3{});
  const auto traj = simulate_full(
      geom, joints, [](double) { return Vec2{0.5, 0.0}; }, Vec3{}, 0.05, dt);
  REQUIRE(!traj.q.empty());
  for (int i = 0; i < 3; ++i) CHECK(traj.q.back()[i] > 0.0);
  // Recorded torque is the actuation torque at the recorded pose.
  const auto tau_ref = actuation_torque(traj.q.back(), {0.5, 0.0}, geom);
  for (int i = 0; i < 3; ++i)
    CHECK_THAT(traj.tau.back()[i], WithinAbs(tau_ref[i], 1e-15));
}
