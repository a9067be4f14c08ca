// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "softcreep/linalg.hpp"

namespace softcreep {

// Three-element viscoelastic joint: a spring kv in parallel with a damper
// cv, that pair in series with a damper cp. The series damper never
// recovers, which is what produces plastic drift under sustained load.
struct JointViscoelasticity {
  double cv = 1.0;  // parallel damping, N m s/rad
  double cp = 1.0;  // series damping, N m s/rad
  double kv = 1.0;  // parallel stiffness, N m/rad

  void validate() const {
    if (!(std::isfinite(cv) && cv > 0.0) || !(std::isfinite(cp) && cp > 0.0) ||
        !(std::isfinite(kv) && kv > 0.0))
      throw std::invalid_argument("JointViscoelasticity: cv, cp, kv must be finite and > 0");
  }
};

// Split of a joint angle into the recoverable and plastic parts,
// q - q_ini = qv + qp.
struct JointInternalState {
  double qv = 0.0;  // rad, spring-damper pair deflection
  double qp = 0.0;  // rad, series damper drift
};

// Diagonals of the matrix constitutive relation
//   A qdot + B q = C tau + D integral(tau dt),
// with A = cv cp, B = cp kv, C = cv + cp, D = kv per joint.
struct ConstitutiveMatrices {
  Vec3 A{}, B{}, C{}, D{};
};

inline ConstitutiveMatrices constitutive_matrices(
    const std::array<JointViscoelasticity, 3>& joints) {
  ConstitutiveMatrices m;
  for (int i = 0; i < 3; ++i) {
    joints[i].validate();
    m.A[i] = joints[i].cv * joints[i].cp;
    m.B[i] = joints[i].cp * joints[i].kv;
    m.C[i] = joints[i].cv + joints[i].cp;
    m.D[i] = joints[i].kv;
  }
  return m;
}

// Closed-form creep response to a torque step of height K applied at t = 0:
//   q(t) = (K/kv)(1 - exp(-kv t / cv)) + (K/cp) t + q_ini.
// The exponential is the recoverable transient, the ramp is plastic drift.
inline double step_response(const JointViscoelasticity& j, double K, double q_ini, double t) {
  j.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("step_response: t must be >= 0");
  return (K / j.kv) * (1.0 - std::exp(-(j.kv / j.cv) * t)) + (K / j.cp) * t + q_ini;
}

// Laplace-domain torque-to-angle transfer function of one joint,
//   G(s) = (num[1] s + num[0]) / (den[2] s^2 + den[1] s + den[0]),
// num = ((cv + cp), kv), den = (cv cp, cp kv, 0). The zero constant term
// is the integrator pole at s = 0 responsible for unbounded creep.
struct TransferFunctionCoeffs {
  std::array<double, 2> num{};  // {n0, n1}, ascending powers of s
  std::array<double, 3> den{};  // {d0, d1, d2}, d0 identically 0
};

inline TransferFunctionCoeffs transfer_function_coeffs(const JointViscoelasticity& j) {
  j.validate();
  TransferFunctionCoeffs tf;
  tf.num = {j.kv, j.cv + j.cp};
  tf.den = {0.0, j.cp * j.kv, j.cv * j.cp};
  return tf;
}

}  // namespace softcreep
