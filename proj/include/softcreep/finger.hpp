// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "softcreep/linalg.hpp"

namespace softcreep {

// Planar three-link finger driven by an antagonistic wire pair. Links are
// rigid; each revolute joint is a short flexible segment with the wires
// anchored a lateral offset away from the bending axis.
struct FingerGeometry {
  Vec3 link_lengths{0.02, 0.02, 0.02};     // m
  Vec3 link_masses{0.002, 0.002, 0.002};   // kg
  Vec3 link_inertias{7e-8, 7e-8, 7e-8};    // kg m^2, about each link's center
  double wire_offset = 0.004;              // m, lateral anchor offset d
  double joint_length = 0.010;             // m, flexible segment length

  void validate() const {
    for (int i = 0; i < 3; ++i) {
      if (!(link_lengths[i] > 0.0) || !(link_masses[i] > 0.0) ||
          !(link_inertias[i] > 0.0))
        throw std::invalid_argument("FingerGeometry: lengths, masses, inertias must be > 0");
    }
    if (!(wire_offset > 0.0))
      throw std::invalid_argument("FingerGeometry: wire_offset must be > 0");
    if (!(joint_length > wire_offset))
      throw std::invalid_argument("FingerGeometry: joint_length must exceed wire_offset");
  }

  // Wire anchor half-angle; at the straight pose both wire elongations
  // vanish because 2 sqrt((l/2)^2 + d^2) cos(a) equals l.
  double anchor_angle() const { return std::atan(2.0 * wire_offset / joint_length); }
  double anchor_radius() const {
    const double h = 0.5 * joint_length;
    return std::sqrt(h * h + wire_offset * wire_offset);
  }
};

// Joint-space state of the finger.
struct JointConfiguration {
  Vec3 q{};     // joint angles, rad
  Vec3 qdot{};  // joint rates, rad/s

  void validate() const {
    for (int i = 0; i < 3; ++i) {
      if (!std::isfinite(q[i]) || !std::isfinite(qdot[i]))
        throw std::invalid_argument("JointConfiguration: state must be finite");
      if (!(std::fabs(q[i]) < M_PI))
        throw std::invalid_argument("JointConfiguration: |q_i| must stay below pi");
    }
  }
};

// Elongations of the two antagonist wires relative to the straight pose.
struct WireState {
  double l1 = 0.0;  // m, wire on the +offset side
  double l2 = 0.0;  // m, wire on the -offset side
};

// Each joint shortens wire 1 by 2R cos(q/2 + a) and wire 2 by
// 2R cos(q/2 - a); elongations sum those contributions over the chain.
inline WireState wire_elongations(const Vec3& q, const FingerGeometry& g) {
  const double a = g.anchor_angle();
  const double r = g.anchor_radius();
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    s1 += std::cos(0.5 * q[i] + a);
    s2 += std::cos(0.5 * q[i] - a);
  }
  WireState w;
  w.l1 = 3.0 * g.joint_length - 2.0 * r * s1;
  w.l2 = 3.0 * g.joint_length - 2.0 * r * s2;
  return w;
}

// Gradient of the wire elongations: row i holds (dl1/dq_i, dl2/dq_i).
// The two columns have opposite signs at the straight pose, which is what
// makes the pair antagonistic.
inline Mat32 wire_jacobian(const Vec3& q, const FingerGeometry& g) {
  const double a = g.anchor_angle();
  const double r = g.anchor_radius();
  Mat32 p;
  for (int i = 0; i < 3; ++i) {
    p[i][0] = r * std::sin(0.5 * q[i] + a);
    p[i][1] = r * std::sin(0.5 * q[i] - a);
  }
  return p;
}

// Joint torque produced by wire tensions f (N, both >= 0): tau = P f.
inline Vec3 actuation_torque(const Vec3& q, const Vec2& tensions, const FingerGeometry& g) {
  if (!(tensions[0] >= 0.0) || !(tensions[1] >= 0.0))
    throw std::invalid_argument("actuation_torque: wire tensions must be >= 0");
  return mul(wire_jacobian(q, g), tensions);
}

namespace detail {

// Joint origins o[i] and link mass centers p[i] in the base frame.
struct ChainPoints {
  std::array<Vec2, 3> o;
  std::array<Vec2, 3> p;
};

inline ChainPoints chain_points(const Vec3& q, const FingerGeometry& g) {
  ChainPoints c;
  double th = 0.0;
  Vec2 pos{0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    th += q[i];
    const Vec2 dir{std::cos(th), std::sin(th)};
    c.o[i] = pos;
    c.p[i] = pos + (0.5 * g.link_lengths[i]) * dir;
    pos = pos + g.link_lengths[i] * dir;
  }
  return c;
}

// d p_k / d q_l: rotating everything distal of joint l about o_l.
inline Vec2 dpoint(const ChainPoints& c, Vec2 pt, int l) { return perp(pt - c.o[l]); }

}  // namespace detail

// Joint-space mass matrix of the chain,
//   M_ij = sum_{k >= max(i,j)} m_k (p_k - o_i) . (p_k - o_j) + I_k.
// Symmetric by construction and positive definite for physical geometry.
inline Mat3 mass_matrix(const Vec3& q, const FingerGeometry& g) {
  const auto c = detail::chain_points(q, g);
  Mat3 m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double s = 0.0;
      for (int k = j; k < 3; ++k)
        s += g.link_masses[k] * dot(c.p[k] - c.o[i], c.p[k] - c.o[j]) + g.link_inertias[k];
      m(i, j) = s;
      m(j, i) = s;
    }
  }
  return m;
}

// Velocity-product term h(q, qdot) from the Christoffel symbols of M(q).
// Partial derivatives of M are assembled analytically from the chain point
// derivatives, so no finite differencing is involved.
inline Vec3 nonlinear_term(const Vec3& q, const Vec3& qdot, const FingerGeometry& g) {
  const auto c = detail::chain_points(q, g);
  // dm[l][i][j] = dM_ij / dq_l
  double dm[3][3][3] = {};
  for (int l = 0; l < 3; ++l) {
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        double s = 0.0;
        for (int k = (i > j ? i : j); k < 3; ++k) {
          const Vec2 ri = c.p[k] - c.o[i];
          const Vec2 rj = c.p[k] - c.o[j];
          Vec2 dri = l <= k ? detail::dpoint(c, c.p[k], l) : Vec2{0.0, 0.0};
          Vec2 drj = dri;
          if (l < i) dri = dri - detail::dpoint(c, c.o[i], l);
          if (l < j) drj = drj - detail::dpoint(c, c.o[j], l);
          s += g.link_masses[k] * (dot(dri, rj) + dot(ri, drj));
        }
        dm[l][i][j] = s;
        dm[l][j][i] = s;
      }
    }
  }
  Vec3 h{};
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        s += 0.5 * (dm[k][i][j] + dm[j][i][k] - dm[i][j][k]) * qdot[j] * qdot[k];
    h[i] = s;
  }
  return h;
}

// Kinetic energy through the mass matrix; equals the direct sum of link
// translational and rotational energies.
inline double kinetic_energy(const Vec3& q, const Vec3& qdot, const FingerGeometry& g) {
  return 0.5 * dot(qdot, mul(mass_matrix(q, g), qdot));
}

}  // namespace softcreep
