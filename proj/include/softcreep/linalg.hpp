// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "softcreep/errors.hpp"

namespace softcreep {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

// 3x2 matrix, row i = gradient of wire w elongations w.r.t. joint i.
using Mat32 = std::array<Vec2, 3>;

struct Mat3 {
  // row-major storage
  std::array<std::array<double, 3>, 3> m{};

  double& operator()(int r, int c) { return m[r][c]; }
  double operator()(int r, int c) const { return m[r][c]; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v[0], s * v[1]}; }
inline double dot(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }

// Rotate 90 degrees counterclockwise; z_hat cross v for planar vectors.
inline Vec2 perp(Vec2 v) { return {-v[1], v[0]}; }

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v[0], s * v[1], s * v[2]}; }
inline double dot(Vec3 a, Vec3 b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 mul(const Mat3& a, Vec3 v) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i)
    r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
  return r;
}

inline Vec3 mul(const Mat32& p, Vec2 f) {
  return {dot(p[0], f), dot(p[1], f), dot(p[2], f)};
}

// Lower Cholesky factor of a symmetric matrix, or nullopt when the matrix
// is not positive definite.
inline std::optional<Mat3> cholesky3(const Mat3& a) {
  Mat3 l{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0)) return std::nullopt;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

// Smallest eigenvalue of a symmetric 3x3 matrix, from the trigonometric
// solution of the characteristic cubic. Strong off-diagonal coupling can
// push this far below the smallest diagonal entry, so step-size bounds
// must use the eigenvalue, not the diagonal.
inline double smallest_eigenvalue_sym3(const Mat3& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  if (p1 == 0.0) return std::min({a(0, 0), a(1, 1), a(2, 2)});
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat3 b{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) b(r, c) = (a(r, c) - (r == c ? q : 0.0)) / p;
  const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                      b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                      b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(detb / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  // Roots are q + 2p cos(phi + 2k pi/3); k = 1 yields the smallest.
  constexpr double kTwoThirdsPi = 2.0943951023931953;
  return q + 2.0 * p * std::cos(phi + kTwoThirdsPi);
}

// Solve a x = b for symmetric positive definite a.
inline Vec3 solve_spd3(const Mat3& a, Vec3 b) {
  auto l = cholesky3(a);
  if (!l) throw NumericalError("3x3 solve: matrix is not positive definite");
  Vec3 y{};
  for (int i = 0; i < 3; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= (*l)(i, k) * y[k];
    y[i] = s / (*l)(i, i);
  }
  Vec3 x{};
  for (int i = 2; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < 3; ++k) s -= (*l)(k, i) * x[k];
    x[i] = s / (*l)(i, i);
  }
  return x;
}

}  // namespace softcreep
