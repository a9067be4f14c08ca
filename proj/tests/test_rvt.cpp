// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <vector>

#include <softcreep/rvt.hpp>

using namespace softcreep;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

JointParameterDistributions reference_joint() {
  JointParameterDistributions d;
  d.cv = {0.5232, -3.6635};
  d.cp = {0.7011, 2.8538};
  d.kv = {0.1973, -2.4441};
  d.q_ini = {0.2, 0.03};
  return d;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j)
    s += 0.5 * (y[j] + y[j - 1]) * (x[j] - x[j - 1]);
  return s;
}

// Determinant of a 4x4 matrix by elimination, for the change-of-variables
// cross-check below.
double det4(std::array<std::array<double, 4>, 4> a) {
  double det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 4; ++row)
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    if (a[col][col] == 0.0) return 0.0;
    for (int row = col + 1; row < 4; ++row) {
      const double f = a[row][col] / a[col][col];
      for (int k = col; k < 4; ++k) a[row][k] -= f * a[col][k];
    }
  }
  return det;
}

}  // namespace

TEST_CASE("the parameter-to-angle map has unit jacobian") {
  // The map T(cv, cp, kv, q_ini) = (cv, cp, kv, displacement + q_ini) is
  // triangular with ones on the diagonal, so its determinant is exactly 1
  // and the transformed density is the plain product of the input
  // densities. Verify the determinant by finite differences.
  const double t = 10.0, k = 0.01;
  const std::array<double, 4> x{0.026, 17.4, 0.087, 0.21};
  const auto map = [&](const std::array<double, 4>& v) {
    const JointViscoelasticity joint{v[0], v[1], v[2]};
    return std::array<double, 4>{
        v[0], v[1], v[2], creep_displacement(joint, k, t) + v[3]};
  };
  std::array<std::array<double, 4>, 4> jac{};
  for (int axis = 0; axis < 4; ++axis) {
    const double h = 1e-6 * (std::abs(x[axis]) + 1e-3);
    auto hi = x, lo = x;
    hi[axis] += h;
    lo[axis] -= h;
    const auto fh = map(hi), fl = map(lo);
    for (int row = 0; row < 4; ++row) jac[row][axis] = (fh[row] - fl[row]) / (2.0 * h);
  }
  CHECK_THAT(det4(jac), WithinAbs(1.0, 1e-8));

  const auto dists = reference_joint();
  const auto y = map(x);
  const double product = dists.cv.pdf(x[0]) * dists.cp.pdf(x[1]) *
                         dists.kv.pdf(x[2]) * dists.q_ini.pdf(x[3]);
  CHECK_THAT(rvt_transformed_density(y[0], y[1], y[2], y[3], t, k, dists),
             WithinRel(product, 1e-14));
}

TEST_CASE("pushforward nodes carry unit probability") {
  const auto dists = reference_joint();
  const QuadratureSpec quad{};
  const auto nodes = pushforward_nodes(dists, 0.01, 10.0, quad);
  REQUIRE(nodes.displacement.size() == 48u * 48u * 48u);
  CHECK_THAT(nodes.mass, WithinAbs(1.0, 1e-4));
  double w = 0.0;
  for (double v : nodes.weight) w += v;
  CHECK_THAT(w, WithinAbs(1.0, 1e-12));
}

TEST_CASE("a starved rule fails the mass check loudly") {
  auto dists = reference_joint();
  dists.cp = {3.2316, 1.3114};  // heavy-tailed axis
  const QuadratureSpec quad{2, 1e-6};
  CHECK_THROWS_AS(pushforward_nodes(dists, 0.01, 10.0, quad), NumericalError);
}

TEST_CASE("marginal reduces to the initial-angle density at t = 0") {
  const auto dists = reference_joint();
  const QuadratureSpec quad{};
  std::vector<double> grid(201);
  for (std::size_t j = 0; j < grid.size(); ++j)
    grid[j] = 0.05 + 0.3 * static_cast<double>(j) / 200.0;
  const auto curve = marginal_pdf(0.0, 0.01, dists, grid, quad);
  REQUIRE(curve.support == grid);  // plenty of mass inside, no regrow
  for (std::size_t j = 0; j < grid.size(); ++j)
    CHECK_THAT(curve.density[j], WithinAbs(dists.q_ini.pdf(grid[j]), 1e-12));
}

TEST_CASE("marginal reduces to the initial-angle density when k = 0") {
  const auto dists = reference_joint();
  const QuadratureSpec quad{};
  std::vector<double> grid(101);
  for (std::size_t j = 0; j < grid.size(); ++j)
    grid[j] = 0.05 + 0.3 * static_cast<double>(j) / 100.0;
  const auto curve = marginal_pdf(17.0, 0.0, dists, grid, quad);
  for (std::size_t j = 0; j < grid.size(); ++j)
    CHECK_THAT(curve.density[j], WithinAbs(dists.q_ini.pdf(grid[j]), 1e-12));
}

TEST_CASE("marginal grid regrows when the mass lies elsewhere") {
  const auto dists = reference_joint();
  const QuadratureSpec quad{};
  std::vector<double> far(512);
  for (std::size_t j = 0; j < far.size(); ++j)
    far[j] = 0.5 + 0.1 * static_cast<double>(j) / 511.0;
  const auto curve = marginal_pdf(10.0, 0.01, dists, far, quad);
  CHECK(curve.support.size() == far.size());
  CHECK(curve.support.front() < 0.5);
  CHECK(curve.support.back() >= 0.6);
  CHECK_THAT(trapezoid(curve.support, curve.density), WithinAbs(1.0, 2e-3));
}

TEST_CASE("marginal grid validation") {
  const auto dists = reference_joint();
  const QuadratureSpec quad{};
  CHECK_THROWS_AS(marginal_pdf(0.0, 0.01, dists, {0.2}, quad), ConfigError);
  CHECK_THROWS_AS(marginal_pdf(0.0, 0.01, dists, {0.3, 0.2, 0.4}, quad),
                  ConfigError);
}

TEST_CASE("marginal density is normalized on a pilot grid") {
  const auto dists = reference_joint();
  const QuadratureSpec quad{};
  const RandomStream rs(11, 0);
  const auto grid = pilot_q_grid(dists, 0.01, 10.0, rs);
  const auto curve = marginal_pdf(10.0, 0.01, dists, grid, quad);
  REQUIRE(curve.support == grid);
  CHECK_THAT(trapezoid(curve.support, curve.density), WithinAbs(1.0, 1e-3));
}

TEST_CASE("node doubling leaves the marginal unchanged") {
  const auto dists = reference_joint();
  const RandomStream rs(11, 0);
  auto grid = pilot_q_grid(dists, 0.01, 10.0, rs, 4096, 256);
  const auto coarse = marginal_pdf(10.0, 0.01, dists, grid, QuadratureSpec{48, 1e-6});
  const auto fine = marginal_pdf(10.0, 0.01, dists, grid, QuadratureSpec{96, 1e-6});
  double sup = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    sup = std::max(sup, std::abs(coarse.density[j] - fine.density[j]));
  CHECK(sup < 1e-4);
}

TEST_CASE("marginal agrees with a monte-carlo kernel estimate") {
  const auto dists = reference_joint();
  const QuadratureSpec quad{};
  const RandomStream rs(2025, 1);
  const double t = 10.0, k = 0.01;
  const auto grid = pilot_q_grid(dists, k, t, rs.derive(0));
  const auto curve = marginal_pdf(t, k, dists, grid, quad);
  auto samples =
      mc_sample_trajectories(dists, k, {t}, 200000, rs.derive(1)).front();
  const auto kde = make_kde(std::move(samples));
  std::vector<double> diff(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    diff[j] = std::abs(curve.density[j] - kde.pdf(grid[j]));
  CHECK(trapezoid(grid, diff) < 0.05);
}

TEST_CASE("expected value creeps forward while the peak flattens") {
  const auto dists = reference_joint();
  const QuadratureSpec quad{32, 1e-6};
  const std::vector<double> times{0.0, 10.0, 20.0, 30.0};
  const auto band = moment_band(times, 0.01, dists, quad);
  for (std::size_t j = 1; j < times.size(); ++j)
    CHECK(band.expected_value[j] >= band.expected_value[j - 1]);
  CHECK(band.standard_deviation.back() > band.standard_deviation.front());

  const RandomStream rs(5, 0);
  double prev_peak = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto grid = pilot_q_grid(dists, 0.01, times[j], rs.derive(j), 4096, 256);
    const auto curve = marginal_pdf(times[j], 0.01, dists, grid, quad);
    double peak = 0.0;
    for (double v : curve.density) peak = std::max(peak, v);
    if (j > 0) CHECK(peak <= prev_peak);
    prev_peak = peak;
  }
}

TEST_CASE("moment band starts from the initial-angle moments") {
  const auto dists = reference_joint();
  const auto band = moment_band({0.0}, 0.01, dists, QuadratureSpec{});
  CHECK_THAT(band.expected_value[0], WithinAbs(0.2, 1e-12));
  CHECK_THAT(band.standard_deviation[0], WithinAbs(0.03, 1e-12));
}

TEST_CASE("quadrature and monte-carlo moments agree") {
  const auto dists = reference_joint();
  const std::vector<double> times{0.0, 10.0, 30.0};
  const auto quad_band = moment_band(times, 0.01, dists, QuadratureSpec{});
  const std::size_t n = 20000;
  const auto mc_band =
      moment_band_mc(times, 0.01, dists, n, RandomStream(314, 0));
  CHECK_NOTHROW(check_moment_agreement(quad_band, mc_band, n));

  auto broken = quad_band;
  broken.expected_value[1] += 0.05;
  CHECK_THROWS_AS(check_moment_agreement(broken, mc_band, n), NumericalError);
  auto short_band = quad_band;
  short_band.times.pop_back();
  CHECK_THROWS_AS(check_moment_agreement(short_band, mc_band, n), ConfigError);
}

TEST_CASE("monte-carlo sampling is reproducible and counter-addressed") {
  const auto dists = reference_joint();
  const RandomStream rs(77, 4);
  const std::vector<double> times{0.0, 10.0};
  const auto a = mc_sample_trajectories(dists, 0.01, times, 100, rs);
  const auto b = mc_sample_trajectories(dists, 0.01, times, 100, rs);
  REQUIRE(a.size() == b.size());
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t i = 0; i < a[j].size(); ++i) CHECK(a[j][i] == b[j][i]);

  // Sample 0 consumes counters 0..3 in (cv, cp, kv, q_ini) order.
  const JointViscoelasticity joint{dists.cv.sample(rs, 0), dists.cp.sample(rs, 1),
                                   dists.kv.sample(rs, 2)};
  const double q0 = dists.q_ini.sample(rs, 3);
  CHECK(a[1][0] == step_response(joint, 0.01, q0, 10.0));
  CHECK_THROWS_AS(mc_sample_trajectories(dists, 0.01, times, 0, rs), ConfigError);
}

TEST_CASE("pilot grid brackets the distribution") {
  const auto dists = reference_joint();
  const RandomStream rs(8, 1);
  const auto grid = pilot_q_grid(dists, 0.01, 10.0, rs);
  REQUIRE(grid.size() == 512);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  CHECK(grid.front() < grid.back());
  // The central mass sits inside the grid: check the extremes against a
  // direct sample batch.
  const auto samples = mc_sample_trajectories(dists, 0.01, {10.0}, 2000, rs).front();
  int inside = 0;
  for (double v : samples)
    if (v >= grid.front() && v <= grid.back()) ++inside;
  CHECK(inside >= 1990);
  CHECK_THROWS_AS(pilot_q_grid(dists, 0.01, 10.0, rs, 1, 512), ConfigError);
  CHECK_THROWS_AS(pilot_q_grid(dists, 0.01, 10.0, rs, 4096, 1), ConfigError);
}

TEST_CASE("kernel density estimate behaves") {
  const NormalShape shape{0.0, 1.0};
  const RandomStream rs(21, 0);
  std::vector<double> samples;
  for (int k = 0; k < 50000; ++k)
    samples.push_back(shape.sample(rs, static_cast<std::uint64_t>(k)));
  const auto kde = make_kde(samples);
  CHECK(kde.bandwidth > 0.0);
  std::vector<double> grid(801), vals(801);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    grid[j] = -8.0 + 16.0 * static_cast<double>(j) / 800.0;
    vals[j] = kde.pdf(grid[j]);
  }
  CHECK_THAT(trapezoid(grid, vals), WithinAbs(1.0, 1e-3));
  CHECK_THAT(kde.pdf(0.0), WithinAbs(shape.pdf(0.0), 0.02));
  CHECK_THROWS_AS(make_kde({1.0}), DataError);
}
