// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "softcreep/errors.hpp"
#include "softcreep/estimation.hpp"
#include "softcreep/rvt.hpp"
#include "softcreep/simulate.hpp"
#include "softcreep/sobol.hpp"

namespace softcreep {

// Shortest round-trip decimal form. Locale-free and byte-stable across
// runs, which is what makes rerun-identical CSV outputs possible.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DataError(where + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

// Writes through a sibling temp file and renames into place, so a
// crash mid-write never leaves a truncated file under the final name.
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw DataError("cannot move " + tmp.string() + " into place: " + ec.message());
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t j = 0; j <= line.size(); ++j) {
    if (j == line.size() || line[j] == ',') {
      fields.push_back(line.substr(start, j - start));
      start = j + 1;
    }
  }
  return fields;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace detail

// Trajectory CSV: header `t,q1,q2,q3`, SI units, LF endings.
inline std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,q1,q2,q3\n";
  for (std::size_t j = 0; j < traj.t.size(); ++j) {
    out += format_double(traj.t[j]);
    for (int i = 0; i < 3; ++i) {
      out += ',';
      out += format_double(traj.q[j][i]);
    }
    out += '\n';
  }
  return out;
}

inline void write_trajectory_csv(const std::filesystem::path& path,
                                 const Trajectory& traj) {
  atomic_write(path, trajectory_csv(traj));
}

inline Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  const auto lines = detail::read_lines(path);
  if (lines.empty() || lines.front() != "t,q1,q2,q3")
    throw DataError(path.string() + ": expected header 't,q1,q2,q3'");
  Trajectory traj;
  traj.t.reserve(lines.size() - 1);
  traj.q.reserve(lines.size() - 1);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::string where = path.string() + ":" + std::to_string(n + 1);
    const auto fields = detail::split_fields(lines[n]);
    if (fields.size() != 4) throw DataError(where + ": expected 4 columns");
    traj.t.push_back(parse_double(fields[0], where));
    Vec3 q{};
    for (int i = 0; i < 3; ++i) q[i] = parse_double(fields[i + 1], where);
    traj.q.push_back(q);
  }
  for (std::size_t n = 1; n < traj.t.size(); ++n)
    if (!(traj.t[n] > traj.t[n - 1]))
      throw DataError(path.string() + ": time column must increase");
  return traj;
}

// Density curves in long format, one row per (time, angle) pair.
inline std::string density_csv(const std::vector<DensityCurve>& curves) {
  std::string out = "time,q,density\n";
  for (const auto& curve : curves) {
    const std::string t = format_double(curve.time);
    for (std::size_t j = 0; j < curve.support.size(); ++j) {
      out += t;
      out += ',';
      out += format_double(curve.support[j]);
      out += ',';
      out += format_double(curve.density[j]);
      out += '\n';
    }
  }
  return out;
}

inline std::string moment_band_csv(const MomentBand& band) {
  std::string out = "t,ev,sd\n";
  for (std::size_t j = 0; j < band.times.size(); ++j) {
    out += format_double(band.times[j]);
    out += ',';
    out += format_double(band.expected_value[j]);
    out += ',';
    out += format_double(band.standard_deviation[j]);
    out += '\n';
  }
  return out;
}

// Sensitivity CSV: one row per time, one column per parameter, plus the
// sum-to-one residual and the degenerate-variance flag. Total-order
// residual columns appear only when the series carries them.
inline std::string sensitivity_csv(const SensitivitySeries& series) {
  const bool with_total = !series.total_residual.empty();
  std::string out = "t,S_cv,S_cp,S_kv,S_qini,sum_residual,degenerate";
  if (with_total)
    for (const char* name : kParameterNames)
      out += std::string(",T_minus_S_") + name;
  out += '\n';
  for (std::size_t j = 0; j < series.times.size(); ++j) {
    out += format_double(series.times[j]);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      out += ',';
      out += format_double(series.indices[j][static_cast<std::size_t>(i)]);
      sum += series.indices[j][static_cast<std::size_t>(i)];
    }
    out += ',';
    out += format_double(sum - 1.0);
    out += ',';
    out += series.degenerate.empty() ? '0' : char('0' + series.degenerate[j]);
    if (with_total) {
      for (int i = 0; i < 4; ++i) {
        out += ',';
        out += format_double(series.total_residual[j][static_cast<std::size_t>(i)]);
      }
    }
    out += '\n';
  }
  return out;
}

// Fitted material-parameter table: columns run over the parameters with
// joints nested inside, rows carry sigma then mu.
inline std::string shape_table_csv(const ParameterDistributions& dists) {
  std::string out = "row";
  for (const char* param : {"cv", "cp", "kv"})
    for (int j = 1; j <= 3; ++j)
      out += std::string(",") + param + "_joint" + std::to_string(j);
  out += '\n';
  const auto shape = [&](int param, int joint) -> const LogNormalShape& {
    const auto& d = dists[static_cast<std::size_t>(joint)];
    return param == 0 ? d.cv : param == 1 ? d.cp : d.kv;
  };
  for (const bool sigma_row : {true, false}) {
    out += sigma_row ? "sigma" : "mu";
    for (int param = 0; param < 3; ++param)
      for (int joint = 0; joint < 3; ++joint) {
        out += ',';
        const auto& s = shape(param, joint);
        out += format_double(sigma_row ? s.sigma : s.mu);
      }
    out += '\n';
  }
  return out;
}

// Fitted initial-angle table, one row per joint.
inline std::string initial_angle_table_csv(const ParameterDistributions& dists) {
  std::string out = "joint,mean,sd\n";
  for (int j = 0; j < 3; ++j) {
    out += std::to_string(j + 1);
    out += ',';
    out += format_double(dists[static_cast<std::size_t>(j)].q_ini.mean);
    out += ',';
    out += format_double(dists[static_cast<std::size_t>(j)].q_ini.sd);
    out += '\n';
  }
  return out;
}

// Generic numeric table with a named header, for small reports.
inline std::string table_csv(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw DataError("table row width disagrees with header");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

// One synthetic trial's bookkeeping: the file it was written to, the
// torque step, the true parameter tuple it was drawn with, and the
// measurement noise level.
struct TrialRecord {
  int trial = 0;
  std::string file;
  Vec3 torque_step{0.0, 0.0, 0.0};
  TrialParams params{};
  double noise_sd = 0.0;
};

inline constexpr const char* kTrialIndexHeader =
    "trial,file,k1,k2,k3,"
    "cv1,cp1,kv1,qini1,cv2,cp2,kv2,qini2,cv3,cp3,kv3,qini3,noise_sd";

inline std::string trial_index_csv(const std::vector<TrialRecord>& records) {
  std::string out = std::string(kTrialIndexHeader) + "\n";
  for (const auto& r : records) {
    out += std::to_string(r.trial);
    out += ',';
    out += r.file;
    for (int i = 0; i < 3; ++i) {
      out += ',';
      out += format_double(r.torque_step[i]);
    }
    for (int i = 0; i < 3; ++i) {
      out += ',';
      out += format_double(r.params.joints[i].cv);
      out += ',';
      out += format_double(r.params.joints[i].cp);
      out += ',';
      out += format_double(r.params.joints[i].kv);
      out += ',';
      out += format_double(r.params.q_ini[i]);
    }
    out += ',';
    out += format_double(r.noise_sd);
    out += '\n';
  }
  return out;
}

inline std::vector<TrialRecord> read_trial_index_csv(
    const std::filesystem::path& path) {
  const auto lines = detail::read_lines(path);
  if (lines.empty() || lines.front() != kTrialIndexHeader)
    throw DataError(path.string() + ": unexpected trial index header");
  std::vector<TrialRecord> records;
  records.reserve(lines.size() - 1);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::string where = path.string() + ":" + std::to_string(n + 1);
    const auto fields = detail::split_fields(lines[n]);
    if (fields.size() != 18) throw DataError(where + ": expected 18 columns");
    TrialRecord r;
    r.trial = static_cast<int>(parse_double(fields[0], where));
    r.file = std::string(fields[1]);
    if (r.file.empty()) throw DataError(where + ": empty file name");
    for (int i = 0; i < 3; ++i)
      r.torque_step[i] = parse_double(fields[2 + static_cast<std::size_t>(i)], where);
    for (int i = 0; i < 3; ++i) {
      const std::size_t base = 5 + 4 * static_cast<std::size_t>(i);
      r.params.joints[i].cv = parse_double(fields[base], where);
      r.params.joints[i].cp = parse_double(fields[base + 1], where);
      r.params.joints[i].kv = parse_double(fields[base + 2], where);
      r.params.q_ini[i] = parse_double(fields[base + 3], where);
    }
    r.noise_sd = parse_double(fields[17], where);
    records.push_back(std::move(r));
  }
  return records;
}

// Loads the trials referenced by an index file. Relative file names
// resolve against the index file's directory. All records must agree on
// the torque step, which becomes the TrialSet's step.
inline TrialSet read_trial_set(const std::filesystem::path& index_path) {
  const auto records = read_trial_index_csv(index_path);
  if (records.empty()) throw DataError(index_path.string() + ": no trials listed");
  TrialSet set;
  set.torque_step = records.front().torque_step;
  const auto dir = index_path.parent_path();
  for (const auto& r : records) {
    for (int i = 0; i < 3; ++i)
      if (r.torque_step[i] != set.torque_step[i])
        throw DataError(index_path.string() +
                        ": trials disagree on the torque step");
    std::filesystem::path file(r.file);
    if (file.is_relative()) file = dir / file;
    set.trials.push_back(read_trajectory_csv(file));
  }
  return set;
}

}  // namespace softcreep
