// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "softcreep/errors.hpp"
#include "softcreep/finger.hpp"
#include "softcreep/linalg.hpp"
#include "softcreep/viscoelastic.hpp"

namespace softcreep {

// Sampled joint-space motion. Angles and applied torques are stored per
// sample; torques may be left empty by readers of external data.
struct Trajectory {
  std::vector<double> t;    // s, strictly increasing, starts at 0
  std::vector<Vec3> q;      // rad
  std::vector<Vec3> tau;    // N m, applied joint torque (may be empty)
};

namespace detail {

inline void check_time_grid(double t_end, double dt) {
  if (!(t_end > 0.0) || !(dt > 0.0) || dt > t_end)
    throw std::invalid_argument("simulate: need 0 < dt <= t_end");
}

// Classical fixed-step RK4 over a flat state array.
template <std::size_t N, class Deriv>
std::array<double, N> rk4_step(const std::array<double, N>& y, double t, double dt,
                               Deriv&& f) {
  std::array<double, N> k1 = f(t, y), y2{}, y3{}, y4{};
  for (std::size_t i = 0; i < N; ++i) y2[i] = y[i] + 0.5 * dt * k1[i];
  std::array<double, N> k2 = f(t + 0.5 * dt, y2);
  for (std::size_t i = 0; i < N; ++i) y3[i] = y[i] + 0.5 * dt * k2[i];
  std::array<double, N> k3 = f(t + 0.5 * dt, y3);
  for (std::size_t i = 0; i < N; ++i) y4[i] = y[i] + dt * k3[i];
  std::array<double, N> k4 = f(t + dt, y4);
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i)
    out[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace detail

// Quasi-static creep: inertia and velocity products neglected, so the
// applied torque loads each joint's viscoelastic element directly. Per
// joint the state is the (qv, qp) split with
//   qv' = (tau - kv qv) / cv,   qp' = tau / cp,   q = q_ini + qv + qp.
// TorqueFn maps time to the per-joint applied torque Vec3.
template <class TorqueFn>
Trajectory simulate_quasi_static(const std::array<JointViscoelasticity, 3>& joints,
                                 TorqueFn&& torque_of_t, const Vec3& q_init,
                                 double t_end, double dt = 1e-3) {
  detail::check_time_grid(t_end, dt);
  for (const auto& j : joints) j.validate();

  const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
  auto deriv = [&](double t, const std::array<double, 6>& s) {
    const Vec3 tau = torque_of_t(t);
    std::array<double, 6> d{};
    for (int i = 0; i < 3; ++i) {
      d[2 * i] = (tau[i] - joints[i].kv * s[2 * i]) / joints[i].cv;
      d[2 * i + 1] = tau[i] / joints[i].cp;
    }
    return d;
  };

  Trajectory out;
  out.t.reserve(n_steps + 1);
  out.q.reserve(n_steps + 1);
  out.tau.reserve(n_steps + 1);
  std::array<double, 6> s{};
  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    out.t.push_back(t);
    out.q.push_back({q_init[0] + s[0] + s[1], q_init[1] + s[2] + s[3],
                     q_init[2] + s[4] + s[5]});
    out.tau.push_back(torque_of_t(t));
    if (k < n_steps) s = detail::rk4_step(s, t, dt, deriv);
  }
  return out;
}

namespace detail {

// Shared core of the full rigid-body simulations. State layout:
// (q0..q2, qdot0..qdot2, qv0..qv2). The internal torque follows from
// eliminating qp through the series damper,
//   qv' = (cp qdot - kv qv) / (cv + cp),  tau_in = kv qv + cv qv'.
template <class TauFn>
Trajectory simulate_full_core(const FingerGeometry& geom,
                              const std::array<JointViscoelasticity, 3>& joints,
                              TauFn&& applied_torque,  // (t, q) -> Vec3
                              const Vec3& q_init, double t_end, double dt,
                              double record_dt) {
  check_time_grid(t_end, dt);
  if (record_dt <= 0.0) record_dt = dt;
  const auto stride = static_cast<std::size_t>(std::llround(record_dt / dt));
  if (stride < 1 || std::abs(static_cast<double>(stride) * dt - record_dt) >
                        1e-9 * record_dt)
    throw ConfigError("record step must be a positive multiple of dt");
  geom.validate();
  for (const auto& j : joints) j.validate();
  JointConfiguration start{q_init, {0.0, 0.0, 0.0}};
  start.validate();

  auto deriv = [&](double t, const std::array<double, 9>& s) {
    const Vec3 q{s[0], s[1], s[2]};
    const Vec3 qd{s[3], s[4], s[5]};
    std::array<double, 9> d{};
    Vec3 tau_in{};
    for (int i = 0; i < 3; ++i) {
      const double qv = s[6 + i];
      const double qvdot =
          (joints[i].cp * qd[i] - joints[i].kv * qv) / (joints[i].cv + joints[i].cp);
      tau_in[i] = joints[i].kv * qv + joints[i].cv * qvdot;
      d[6 + i] = qvdot;
    }
    const Vec3 rhs = applied_torque(t, q) - nonlinear_term(q, qd, geom) - tau_in;
    const Vec3 qdd = solve_spd3(mass_matrix(q, geom), rhs);
    d[0] = qd[0];
    d[1] = qd[1];
    d[2] = qd[2];
    d[3] = qdd[0];
    d[4] = qdd[1];
    d[5] = qdd[2];
    return d;
  };

  const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
  // Divergence guard thresholds; generous, meant to catch an unstable dt,
  // not to police physical plausibility.
  const double energy_cap = 1e6;

  Trajectory out;
  out.t.reserve(n_steps / stride + 2);
  out.q.reserve(n_steps / stride + 2);
  out.tau.reserve(n_steps / stride + 2);
  std::array<double, 9> s{q_init[0], q_init[1], q_init[2], 0, 0, 0, 0, 0, 0};
  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vec3 q{s[0], s[1], s[2]};
    if (k % stride == 0 || k == n_steps) {
      out.t.push_back(t);
      out.q.push_back(q);
      out.tau.push_back(applied_torque(t, q));
    }
    if (k == n_steps) break;
    s = rk4_step(s, t, dt, deriv);
    bool finite = true;
    for (double v : s) finite = finite && std::isfinite(v);
    if (!finite)
      throw NumericalError("simulate_full: state diverged (time step too large?)");
    const double ke =
        kinetic_energy({s[0], s[1], s[2]}, {s[3], s[4], s[5]}, geom);
    if (!(ke < energy_cap))
      throw NumericalError("simulate_full: kinetic energy diverged (time step too large?)");
  }
  return out;
}

}  // namespace detail

// Full dynamics M(q) qddot + h(q, qdot) + tau_internal = tau_actuation,
// driven by a wire tension pair. TensionFn maps time to Vec2 of tensions.
template <class TensionFn>
Trajectory simulate_full(const FingerGeometry& geom,
                         const std::array<JointViscoelasticity, 3>& joints,
                         TensionFn&& tensions_of_t, const Vec3& q_init,
                         double t_end, double dt, double record_dt = 0.0) {
  return detail::simulate_full_core(
      geom, joints,
      [&](double t, const Vec3& q) { return actuation_torque(q, tensions_of_t(t), geom); },
      q_init, t_end, dt, record_dt);
}

// Full dynamics under a prescribed joint torque profile. Used to compare
// against the quasi-static model under identical loading.
template <class TorqueFn>
Trajectory simulate_full_torque(const FingerGeometry& geom,
                                const std::array<JointViscoelasticity, 3>& joints,
                                TorqueFn&& torque_of_t, const Vec3& q_init,
                                double t_end, double dt, double record_dt = 0.0) {
  return detail::simulate_full_core(
      geom, joints, [&](double t, const Vec3&) { return torque_of_t(t); }, q_init,
      t_end, dt, record_dt);
}

// A stable explicit step for the full model. The stiffest mode is the
// damping rate c_eff / inertia where c_eff = cv cp / (cv + cp) is the
// instantaneous joint damping; the smallest eigenvalue of M bounds the
// smallest effective inertia under coupling. Keeps |lambda| dt at most
// 0.5, well inside the RK4 real-axis bound of 2.78.
inline double suggest_full_dt(const FingerGeometry& geom,
                              const std::array<JointViscoelasticity, 3>& joints,
                              const Vec3& q_init) {
  const Mat3 m = mass_matrix(q_init, geom);
  const double min_inertia = smallest_eigenvalue_sym3(m);
  if (!(min_inertia > 0.0))
    throw NumericalError("suggest_full_dt: mass matrix is not positive definite");
  double max_ceff = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double c_eff = joints[i].cv * joints[i].cp / (joints[i].cv + joints[i].cp);
    max_ceff = std::max(max_ceff, c_eff);
  }
  return min_inertia / (2.0 * max_ceff);
}

}  // namespace softcreep
