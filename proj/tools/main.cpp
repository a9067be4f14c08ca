// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: configuration, command dispatch, CSV/SVG
// emission. Every command is a deterministic function of the effective
// configuration (file + flag overrides); the result manifest is always
// the last file written.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <softcreep/softcreep.hpp>

namespace fs = std::filesystem;
using namespace softcreep;

namespace {

struct CommandContext {
  RunConfig cfg;
  fs::path out_dir;
  bool no_plots = false;
  std::optional<fs::path> config_file;
  ResultManifest manifest;
  std::chrono::steady_clock::time_point started;

  void begin(const std::string& command) {
    started = std::chrono::steady_clock::now();
    manifest.command = command;
    manifest.config_hash = hex64(fnv1a64(serialize_config(cfg)));
    if (config_file)
      manifest.input_hashes[config_file->string()] = hash_file(*config_file);
    fs::create_directories(out_dir);
  }

  void write_text(const std::string& name, const std::string& content) {
    atomic_write(out_dir / name, content);
    manifest.record_output(out_dir, name);
  }

  void finish() {
    manifest.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    write_manifest(out_dir, manifest);
  }
};

std::array<JointViscoelasticity, 3> median_joints(const ParameterDistributions& d) {
  std::array<JointViscoelasticity, 3> joints{};
  for (int i = 0; i < 3; ++i)
    joints[i] = {d[i].cv.median(), d[i].cp.median(), d[i].kv.median()};
  return joints;
}

Vec3 mean_initial_angles(const ParameterDistributions& d) {
  return {d[0].q_ini.mean, d[1].q_ini.mean, d[2].q_ini.mean};
}

std::vector<double> uniform_grid(double t_end, double step) {
  const auto n = static_cast<std::size_t>(std::llround(t_end / step));
  std::vector<double> t(n + 1);
  for (std::size_t j = 0; j <= n; ++j) t[j] = static_cast<double>(j) * step;
  return t;
}

SvgSeries trajectory_series(const Trajectory& traj, int joint,
                            const std::string& label) {
  SvgSeries s;
  s.label = label;
  s.x = traj.t;
  s.y.resize(traj.q.size());
  for (std::size_t j = 0; j < traj.q.size(); ++j) s.y[j] = traj.q[j][joint];
  return s;
}

// ---------------------------------------------------------------------------
// simulate: deterministic trajectories at the distribution medians.

void cmd_simulate(CommandContext& ctx) {
  ctx.begin("simulate");
  const auto& cfg = ctx.cfg;
  const auto joints = median_joints(cfg.distributions);
  const Vec3 q0 = mean_initial_angles(cfg.distributions);
  const Vec3 torque = cfg.torque_step();

  const auto torque_fn = [&](double) { return torque; };
  const Trajectory qs = simulate_quasi_static(joints, torque_fn, q0,
                                              cfg.time.horizon, cfg.time.dt);
  ctx.write_text("quasi_static.csv", trajectory_csv(qs));

  // The full model resolves inertial transients that die out in
  // milliseconds; a short window at the stability-limited step is enough
  // to exhibit them without dominating the command's runtime.
  const double full_horizon = std::min(cfg.time.horizon, 2.0);
  const double dt_full = suggest_full_dt(cfg.geometry, joints, q0);
  const auto n_sub = static_cast<std::size_t>(
      std::max(1.0, std::ceil(cfg.time.dt / dt_full)));
  const double dt_used = cfg.time.dt / static_cast<double>(n_sub);
  const Trajectory full = simulate_full_torque(cfg.geometry, joints, torque_fn, q0,
                                               full_horizon, dt_used, cfg.time.dt);
  ctx.write_text("full_dynamics.csv", trajectory_csv(full));

  if (!ctx.no_plots) {
    std::vector<SvgSeries> series;
    for (int i = 0; i < 3; ++i)
      series.push_back(trajectory_series(qs, i, "joint " + std::to_string(i + 1)));
    ctx.write_text("quasi_static.svg",
                   line_chart_svg("Quasi-static creep response", "t (s)",
                                  "q (rad)", series));
  }
  ctx.finish();
}

// ---------------------------------------------------------------------------
// generate-trials: synthetic noisy creep recordings plus an index file.

void cmd_generate_trials(CommandContext& ctx, int n_override) {
  ctx.begin("generate-trials");
  const auto& cfg = ctx.cfg;
  const int n_trials = n_override > 0 ? n_override : cfg.trials.count;
  const Vec3 torque = cfg.torque_step();

  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(n_trials));
  for (int n = 0; n < n_trials; ++n) {
    const RandomStream trial_stream(cfg.seed, static_cast<std::uint64_t>(n));
    const auto params =
        sample_trial_params(cfg.distributions, trial_stream.derive(0));
    const Trajectory traj =
        synthesize_trial(params, torque, cfg.time.horizon, cfg.trials.rate_hz,
                         cfg.trials.noise_sd, trial_stream.derive(1));
    char name[32];
    std::snprintf(name, sizeof name, "trial_%03d.csv", n);
    ctx.write_text(name, trajectory_csv(traj));
    records.push_back({n, name, torque, params, cfg.trials.noise_sd});
  }
  ctx.write_text("trials_index.csv", trial_index_csv(records));
  ctx.finish();
}

// ---------------------------------------------------------------------------
// fit: distribution estimation from recorded trials.

std::string histogram_csv(const EstimationSummary& summary) {
  std::string out = "joint,param,bin_lo,bin_hi,density\n";
  constexpr int kBins = 16;
  for (int j = 0; j < 3; ++j) {
    for (int p = 0; p < 4; ++p) {
      const auto& samples = summary.samples[static_cast<std::size_t>(j)]
                                           [static_cast<std::size_t>(p)];
      if (samples.size() < 2) continue;
      const double lo = samples.front();
      const double hi = samples.back();
      if (!(hi > lo)) continue;
      const double width = (hi - lo) / kBins;
      std::array<int, kBins> counts{};
      for (const double v : samples) {
        auto bin = static_cast<int>((v - lo) / width);
        bin = std::clamp(bin, 0, kBins - 1);
        ++counts[static_cast<std::size_t>(bin)];
      }
      const double norm =
          1.0 / (static_cast<double>(samples.size()) * width);
      for (int b = 0; b < kBins; ++b) {
        out += std::to_string(j + 1);
        out += ',';
        out += kParameterNames[static_cast<std::size_t>(p)];
        out += ',';
        out += format_double(lo + b * width);
        out += ',';
        out += format_double(lo + (b + 1) * width);
        out += ',';
        out += format_double(counts[static_cast<std::size_t>(b)] * norm);
        out += '\n';
      }
    }
  }
  return out;
}

void cmd_fit(CommandContext& ctx, const fs::path& trials_path) {
  ctx.begin("fit");
  ctx.manifest.input_hashes[trials_path.string()] = hash_file(trials_path);
  const TrialSet set = read_trial_set(trials_path);
  const auto summary = estimate_distributions(set);

  ctx.write_text("fitted_shapes.csv", shape_table_csv(summary.dists));
  ctx.write_text("fitted_initial_angles.csv",
                 initial_angle_table_csv(summary.dists));
  ctx.write_text("histograms.csv", histogram_csv(summary));

  std::string report = "joint,trials_used,kept_cv,kept_cp,kept_kv,kept_qini\n";
  for (int j = 0; j < 3; ++j) {
    report += std::to_string(j + 1);
    report += ',' + std::to_string(summary.trials_used[static_cast<std::size_t>(j)]);
    for (int p = 0; p < 4; ++p)
      report += ',' + std::to_string(
                          summary.kept[static_cast<std::size_t>(j)]
                                      [static_cast<std::size_t>(p)]);
    report += '\n';
  }
  ctx.write_text("fit_report.csv", report);
  if (!summary.failures.empty()) {
    std::string failures;
    for (const auto& f : summary.failures) failures += f + "\n";
    ctx.write_text("fit_failures.txt", failures);
    std::cerr << summary.failures.size() << " joint fit(s) failed; see "
              << (ctx.out_dir / "fit_failures.txt").string() << "\n";
  }
  ctx.finish();
}

// ---------------------------------------------------------------------------
// pdf: quadrature-pushforward densities, moment bands, MC oracle report.

void cmd_pdf(CommandContext& ctx) {
  ctx.begin("pdf");
  const auto& cfg = ctx.cfg;
  const Vec3 torque = cfg.torque_step();
  std::vector<std::vector<double>> report_rows;

  for (int j = 0; j < 3; ++j) {
    const auto& dists = cfg.distributions[static_cast<std::size_t>(j)];
    const double k = torque[j];
    const RandomStream joint_stream(cfg.seed, 0x70646600ull + static_cast<std::uint64_t>(j));

    std::vector<DensityCurve> curves;
    curves.reserve(cfg.time.pdf_times.size());
    const auto oracle = mc_sample_trajectories(
        dists, k, cfg.time.pdf_times, cfg.mc.pdf_samples, joint_stream.derive(1));
    for (std::size_t ti = 0; ti < cfg.time.pdf_times.size(); ++ti) {
      const double t = cfg.time.pdf_times[ti];
      const auto grid = pilot_q_grid(dists, k, t, joint_stream.derive(100 + ti),
                                     cfg.mc.pilot_samples);
      curves.push_back(marginal_pdf(t, k, dists, grid, cfg.quadrature));

      // L1 distance between the quadrature density and the MC kernel
      // estimate, by trapezoid on the curve's own grid.
      const auto kde = make_kde(oracle[ti]);
      const auto& curve = curves.back();
      double l1 = 0.0;
      double prev = std::abs(curve.density[0] - kde.pdf(curve.support[0]));
      for (std::size_t g = 1; g < curve.support.size(); ++g) {
        const double cur = std::abs(curve.density[g] - kde.pdf(curve.support[g]));
        l1 += 0.5 * (prev + cur) * (curve.support[g] - curve.support[g - 1]);
        prev = cur;
      }
      report_rows.push_back({static_cast<double>(j + 1), t, l1});
    }
    ctx.write_text("density_joint" + std::to_string(j + 1) + ".csv",
                   density_csv(curves));

    const auto band_times = uniform_grid(cfg.time.horizon, cfg.time.sensitivity_step);
    const auto band = moment_band(band_times, k, dists, cfg.quadrature);
    constexpr std::size_t kBandOracleSamples = 20000;
    const auto band_oracle = moment_band_mc(band_times, k, dists,
                                            kBandOracleSamples, joint_stream.derive(2));
    check_moment_agreement(band, band_oracle, kBandOracleSamples);
    ctx.write_text("band_joint" + std::to_string(j + 1) + ".csv",
                   moment_band_csv(band));

    if (!ctx.no_plots) {
      std::vector<SvgSeries> density_series;
      for (const auto& curve : curves) {
        SvgSeries s;
        s.label = "t = " + detail::tick_label(curve.time) + " s";
        s.x = curve.support;
        s.y = curve.density;
        density_series.push_back(std::move(s));
      }
      ctx.write_text("density_joint" + std::to_string(j + 1) + ".svg",
                     line_chart_svg("Joint " + std::to_string(j + 1) +
                                        " angle density",
                                    "q (rad)", "density (1/rad)", density_series));
      std::vector<SvgSeries> band_series(3);
      band_series[0] = {"EV", band.times, band.expected_value};
      band_series[1].label = "EV + SD";
      band_series[2].label = "EV - SD";
      band_series[1].x = band_series[2].x = band.times;
      for (std::size_t g = 0; g < band.times.size(); ++g) {
        band_series[1].y.push_back(band.expected_value[g] +
                                   band.standard_deviation[g]);
        band_series[2].y.push_back(band.expected_value[g] -
                                   band.standard_deviation[g]);
      }
      ctx.write_text("band_joint" + std::to_string(j + 1) + ".svg",
                     line_chart_svg("Joint " + std::to_string(j + 1) +
                                        " angle moments",
                                    "t (s)", "q (rad)", band_series));
    }
  }
  ctx.write_text("pdf_report.csv",
                 table_csv({"joint", "time", "l1_mc"}, report_rows));
  ctx.finish();
}

// ---------------------------------------------------------------------------
// sensitivity: time-resolved first-order indices per joint.

void cmd_sensitivity(CommandContext& ctx, bool with_total_order) {
  ctx.begin("sensitivity");
  const auto& cfg = ctx.cfg;
  const Vec3 torque = cfg.torque_step();
  const auto times = uniform_grid(cfg.time.horizon, cfg.time.sensitivity_step);

  for (int j = 0; j < 3; ++j) {
    const auto series = creep_sensitivity_series(
        cfg.distributions[static_cast<std::size_t>(j)], torque[j], times,
        cfg.mc.sobol_samples, cfg.seed, static_cast<std::uint64_t>(j),
        with_total_order);
    ctx.write_text("sensitivity_joint" + std::to_string(j + 1) + ".csv",
                   sensitivity_csv(series));
    if (!ctx.no_plots) {
      std::vector<SvgSeries> chart;
      for (int p = 0; p < 4; ++p) {
        SvgSeries s;
        s.label = std::string("S_") + kParameterNames[static_cast<std::size_t>(p)];
        s.x = series.times;
        for (const auto& idx : series.indices)
          s.y.push_back(idx[static_cast<std::size_t>(p)]);
        chart.push_back(std::move(s));
      }
      ctx.write_text("sensitivity_joint" + std::to_string(j + 1) + ".svg",
                     line_chart_svg("Joint " + std::to_string(j + 1) +
                                        " first-order sensitivity",
                                    "t (s)", "index", chart));
    }
  }
  ctx.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic creep modeling toolkit for a tendon-driven soft finger"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  std::string out_override;
  bool no_plots = false;
  app.add_option("--config", config_path, "configuration file (dotted-key format)")
      ->check(CLI::ExistingFile);
  auto* seed_opt =
      app.add_option("--seed", seed_override, "override the configured seed");
  app.add_option("--out", out_override, "override the configured output directory");
  app.add_flag("--no-plots", no_plots, "skip SVG emission");

  auto* sim = app.add_subcommand(
      "simulate", "deterministic creep trajectories at the distribution medians");
  auto* gen = app.add_subcommand("generate-trials",
                                 "synthesize noisy creep recordings");
  int n_trials_override = 0;
  gen->add_option("--n-trials", n_trials_override,
                  "number of trials (default: trials.count)");
  auto* fit = app.add_subcommand("fit", "estimate parameter distributions");
  std::string trials_path;
  fit->add_option("trials_index", trials_path, "trial index CSV")
      ->required()
      ->check(CLI::ExistingFile);
  auto* pdf = app.add_subcommand(
      "pdf", "push distributions through the creep response to angle densities");
  auto* sens = app.add_subcommand("sensitivity",
                                  "time-resolved first-order Sobol indices");
  bool with_total_order = false;
  sens->add_flag("--total-order", with_total_order,
                 "also report total-order minus first-order residuals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CommandContext ctx;
    if (!config_path.empty()) {
      ctx.cfg = load_config(config_path);
      ctx.config_file = fs::path(config_path);
    }
    if (seed_opt->count() > 0) ctx.cfg.seed = seed_override;
    if (!out_override.empty()) ctx.cfg.output_dir = out_override;
    ctx.cfg.validate();
    ctx.out_dir = fs::path(ctx.cfg.output_dir);
    ctx.no_plots = no_plots;

    if (sim->parsed()) {
      cmd_simulate(ctx);
    } else if (gen->parsed()) {
      cmd_generate_trials(ctx, n_trials_override);
    } else if (fit->parsed()) {
      cmd_fit(ctx, trials_path);
    } else if (pdf->parsed()) {
      cmd_pdf(ctx);
    } else if (sens->parsed()) {
      cmd_sensitivity(ctx, with_total_order);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
