// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "softcreep/csv.hpp"
#include "softcreep/distributions.hpp"
#include "softcreep/errors.hpp"
#include "softcreep/finger.hpp"
#include "softcreep/quadrature.hpp"

namespace softcreep {

// Packaged default shapes: the reference material-parameter fit of the
// proximal joint, reused for all three joints, with a mildly uncertain
// initial angle. These defaults satisfy every validation and keep all
// toolkit commands well-conditioned at the default sample sizes.
inline ParameterDistributions canonical_distributions() {
  const JointParameterDistributions joint{
      LogNormalShape{0.5232, -3.6635},  // cv
      LogNormalShape{0.7011, 2.8538},   // cp
      LogNormalShape{0.1973, -2.4441},  // kv
      NormalShape{0.2, 0.03},           // q_ini
  };
  return {joint, joint, joint};
}

struct TimeConfig {
  double horizon = 30.0;           // s
  double dt = 1e-3;                // s, quasi-static integration and output step
  double sensitivity_step = 0.1;   // s, sensitivity time grid spacing
  std::vector<double> pdf_times{0.0, 10.0, 20.0, 30.0};
};

struct McConfig {
  std::size_t pdf_samples = 1000000;   // oracle KDE sample count
  std::size_t sobol_samples = 100000;  // per-instant pick-freeze samples
  std::size_t pilot_samples = 4096;    // pilot draw for angle grids
};

struct TrialConfig {
  int count = 100;
  double rate_hz = 30.0;
  double noise_sd = 1e-3;  // rad
};

// Full run configuration. Torque is specified either per joint or as a
// wire tension pair; exactly one of the two must be active.
struct RunConfig {
  FingerGeometry geometry{};
  ParameterDistributions distributions = canonical_distributions();
  std::optional<Vec3> torque_per_joint = Vec3{0.01, 0.01, 0.01};
  std::optional<Vec2> torque_tensions;
  TimeConfig time{};
  QuadratureSpec quadrature{};
  McConfig mc{};
  TrialConfig trials{};
  std::uint64_t seed = 42;
  std::string output_dir = "out";

  void validate() const {
    geometry.validate();
    for (const auto& d : distributions) {
      d.cv.validate();
      d.cp.validate();
      d.kv.validate();
      d.q_ini.validate();
    }
    if (torque_per_joint.has_value() == torque_tensions.has_value())
      throw ConfigError(
          "exactly one of torque.per_joint and torque.tensions must be set");
    if (torque_per_joint)
      for (double v : *torque_per_joint)
        if (!std::isfinite(v)) throw ConfigError("torque.per_joint must be finite");
    if (torque_tensions)
      for (double v : *torque_tensions)
        if (!(v >= 0.0) || !std::isfinite(v))
          throw ConfigError("torque.tensions must be non-negative");
    if (!(time.horizon > 0.0)) throw ConfigError("time.horizon must be positive");
    if (!(time.dt > 0.0) || time.dt > time.horizon)
      throw ConfigError("time.dt must lie in (0, horizon]");
    if (!(time.sensitivity_step > 0.0) || time.sensitivity_step > time.horizon)
      throw ConfigError("time.sensitivity_step must lie in (0, horizon]");
    if (time.pdf_times.empty()) throw ConfigError("time.pdf_times must be nonempty");
    for (std::size_t j = 0; j < time.pdf_times.size(); ++j) {
      const double t = time.pdf_times[j];
      if (!(t >= 0.0) || t > time.horizon)
        throw ConfigError("time.pdf_times must lie in [0, horizon]");
      if (j > 0 && !(t > time.pdf_times[j - 1]))
        throw ConfigError("time.pdf_times must be strictly increasing");
    }
    quadrature.validate();
    if (mc.pdf_samples < 2) throw ConfigError("mc.pdf_samples must be at least 2");
    if (mc.sobol_samples < 1000)
      throw ConfigError("mc.sobol_samples must be at least 1000");
    if (mc.pilot_samples < 2)
      throw ConfigError("mc.pilot_samples must be at least 2");
    if (trials.count < 1) throw ConfigError("trials.count must be at least 1");
    if (!(trials.rate_hz > 0.0)) throw ConfigError("trials.rate_hz must be positive");
    if (!(trials.noise_sd >= 0.0))
      throw ConfigError("trials.noise_sd must be non-negative");
    if (output_dir.empty()) throw ConfigError("output.dir must be nonempty");
  }

  // Constant per-joint torque step used by the creep pipeline. A tension
  // pair converts through the wire Jacobian at the mean initial pose;
  // holding that conversion constant is consistent with the quasi-static
  // creep protocol, where the pose change over a trial stays small.
  Vec3 torque_step() const {
    if (torque_per_joint) return *torque_per_joint;
    const Vec3 q_mean{distributions[0].q_ini.mean, distributions[1].q_ini.mean,
                      distributions[2].q_ini.mean};
    return actuation_torque(q_mean, *torque_tensions, geometry);
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline std::vector<double> parse_double_list(std::string_view value,
                                             const std::string& where,
                                             std::size_t expected = 0) {
  std::vector<double> out;
  std::size_t start = 0;
  for (std::size_t j = 0; j <= value.size(); ++j) {
    if (j == value.size() || value[j] == ',') {
      out.push_back(parse_double(trim(value.substr(start, j - start)), where));
      start = j + 1;
    }
  }
  if (expected != 0 && out.size() != expected)
    throw ConfigError(where + ": expected " + std::to_string(expected) +
                      " comma-separated values");
  return out;
}

inline std::uint64_t parse_u64(std::string_view value, const std::string& where) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size())
    throw ConfigError(where + ": expected a non-negative integer, got '" +
                      std::string(value) + "'");
  return v;
}

}  // namespace detail

// Parses the dotted-key configuration format. Lines are `key = value`;
// blank lines and lines starting with '#' are ignored. Unknown keys and
// keys given twice are errors: silently dropping a typo would corrupt
// results downstream.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool saw_per_joint = false;
  bool saw_tensions = false;

  using Handler = std::function<void(std::string_view, const std::string&)>;
  std::map<std::string, Handler, std::less<>> handlers;

  const auto scalar = [&](double* field) {
    return [field](std::string_view v, const std::string& where) {
      *field = parse_double(detail::trim(v), where);
    };
  };
  const auto triple = [&](std::array<double, 3>* field) {
    return [field](std::string_view v, const std::string& where) {
      const auto list = detail::parse_double_list(v, where, 3);
      std::copy(list.begin(), list.end(), field->begin());
    };
  };
  const auto size_field = [&](std::size_t* field) {
    return [field](std::string_view v, const std::string& where) {
      *field = static_cast<std::size_t>(detail::parse_u64(detail::trim(v), where));
    };
  };

  handlers["geometry.link_lengths"] = triple(&cfg.geometry.link_lengths);
  handlers["geometry.link_masses"] = triple(&cfg.geometry.link_masses);
  handlers["geometry.link_inertias"] = triple(&cfg.geometry.link_inertias);
  handlers["geometry.wire_offset"] = scalar(&cfg.geometry.wire_offset);
  handlers["geometry.joint_length"] = scalar(&cfg.geometry.joint_length);
  handlers["torque.per_joint"] = [&](std::string_view v, const std::string& where) {
    const auto list = detail::parse_double_list(v, where, 3);
    cfg.torque_per_joint = Vec3{list[0], list[1], list[2]};
    saw_per_joint = true;
  };
  handlers["torque.tensions"] = [&](std::string_view v, const std::string& where) {
    const auto list = detail::parse_double_list(v, where, 2);
    cfg.torque_tensions = Vec2{list[0], list[1]};
    saw_tensions = true;
  };
  handlers["time.horizon"] = scalar(&cfg.time.horizon);
  handlers["time.dt"] = scalar(&cfg.time.dt);
  handlers["time.sensitivity_step"] = scalar(&cfg.time.sensitivity_step);
  handlers["time.pdf_times"] = [&](std::string_view v, const std::string& where) {
    cfg.time.pdf_times = detail::parse_double_list(v, where);
  };
  for (int j = 0; j < 3; ++j) {
    const std::string prefix = "joint" + std::to_string(j + 1) + ".";
    auto& dist = cfg.distributions[static_cast<std::size_t>(j)];
    handlers[prefix + "cv.sigma"] = scalar(&dist.cv.sigma);
    handlers[prefix + "cv.mu"] = scalar(&dist.cv.mu);
    handlers[prefix + "cp.sigma"] = scalar(&dist.cp.sigma);
    handlers[prefix + "cp.mu"] = scalar(&dist.cp.mu);
    handlers[prefix + "kv.sigma"] = scalar(&dist.kv.sigma);
    handlers[prefix + "kv.mu"] = scalar(&dist.kv.mu);
    handlers[prefix + "qini.mean"] = scalar(&dist.q_ini.mean);
    handlers[prefix + "qini.sd"] = scalar(&dist.q_ini.sd);
  }
  handlers["quadrature.nodes_per_axis"] = [&](std::string_view v,
                                              const std::string& where) {
    cfg.quadrature.nodes_per_axis =
        static_cast<int>(detail::parse_u64(detail::trim(v), where));
  };
  handlers["quadrature.quantile_cut"] = scalar(&cfg.quadrature.quantile_cut);
  handlers["mc.pdf_samples"] = size_field(&cfg.mc.pdf_samples);
  handlers["mc.sobol_samples"] = size_field(&cfg.mc.sobol_samples);
  handlers["mc.pilot_samples"] = size_field(&cfg.mc.pilot_samples);
  handlers["trials.count"] = [&](std::string_view v, const std::string& where) {
    cfg.trials.count = static_cast<int>(detail::parse_u64(detail::trim(v), where));
  };
  handlers["trials.rate_hz"] = scalar(&cfg.trials.rate_hz);
  handlers["trials.noise_sd"] = scalar(&cfg.trials.noise_sd);
  handlers["seed"] = [&](std::string_view v, const std::string& where) {
    cfg.seed = detail::parse_u64(detail::trim(v), where);
  };
  handlers["output.dir"] = [&](std::string_view v, const std::string&) {
    cfg.output_dir = std::string(detail::trim(v));
  };

  std::map<std::string, int, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    const std::string where = "line " + std::to_string(line_no) + " (" + key + ")";
    const auto it = handlers.find(key);
    if (it == handlers.end())
      throw ConfigError(where + ": unknown configuration key");
    if (++seen[key] > 1) throw ConfigError(where + ": key given twice");
    it->second(value, where);
  }

  if (saw_per_joint && saw_tensions)
    throw ConfigError(
        "torque.per_joint and torque.tensions are mutually exclusive");
  // A tension specification replaces the default per-joint torque.
  if (saw_tensions && !saw_per_joint) cfg.torque_per_joint.reset();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

// Serializes in a fixed canonical key order with round-trip-exact
// numbers, so parse(serialize(cfg)) reproduces cfg and serializing
// again yields identical bytes.
inline std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  const auto put = [&](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  const auto list = [&](const double* v, std::size_t n) {
    std::string s;
    for (std::size_t j = 0; j < n; ++j) {
      if (j) s += ", ";
      s += format_double(v[j]);
    }
    return s;
  };
  put("geometry.link_lengths", list(cfg.geometry.link_lengths.data(), 3));
  put("geometry.link_masses", list(cfg.geometry.link_masses.data(), 3));
  put("geometry.link_inertias", list(cfg.geometry.link_inertias.data(), 3));
  put("geometry.wire_offset", format_double(cfg.geometry.wire_offset));
  put("geometry.joint_length", format_double(cfg.geometry.joint_length));
  if (cfg.torque_per_joint)
    put("torque.per_joint", list(cfg.torque_per_joint->data(), 3));
  if (cfg.torque_tensions)
    put("torque.tensions", list(cfg.torque_tensions->data(), 2));
  put("time.horizon", format_double(cfg.time.horizon));
  put("time.dt", format_double(cfg.time.dt));
  put("time.sensitivity_step", format_double(cfg.time.sensitivity_step));
  put("time.pdf_times", list(cfg.time.pdf_times.data(), cfg.time.pdf_times.size()));
  for (int j = 0; j < 3; ++j) {
    const std::string prefix = "joint" + std::to_string(j + 1) + ".";
    const auto& dist = cfg.distributions[static_cast<std::size_t>(j)];
    put(prefix + "cv.sigma", format_double(dist.cv.sigma));
    put(prefix + "cv.mu", format_double(dist.cv.mu));
    put(prefix + "cp.sigma", format_double(dist.cp.sigma));
    put(prefix + "cp.mu", format_double(dist.cp.mu));
    put(prefix + "kv.sigma", format_double(dist.kv.sigma));
    put(prefix + "kv.mu", format_double(dist.kv.mu));
    put(prefix + "qini.mean", format_double(dist.q_ini.mean));
    put(prefix + "qini.sd", format_double(dist.q_ini.sd));
  }
  put("quadrature.nodes_per_axis", std::to_string(cfg.quadrature.nodes_per_axis));
  put("quadrature.quantile_cut", format_double(cfg.quadrature.quantile_cut));
  put("mc.pdf_samples", std::to_string(cfg.mc.pdf_samples));
  put("mc.sobol_samples", std::to_string(cfg.mc.sobol_samples));
  put("mc.pilot_samples", std::to_string(cfg.mc.pilot_samples));
  put("trials.count", std::to_string(cfg.trials.count));
  put("trials.rate_hz", format_double(cfg.trials.rate_hz));
  put("trials.noise_sd", format_double(cfg.trials.noise_sd));
  put("seed", std::to_string(cfg.seed));
  put("output.dir", cfg.output_dir);
  return out;
}

}  // namespace softcreep
