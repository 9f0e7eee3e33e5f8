#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "wavedens/common.hpp"
#include "wavedens/convergence.hpp"
#include "wavedens/functions.hpp"
#include "wavedens/oracle_ft.hpp"
#include "wavedens/spectrum.hpp"

namespace wavedens {

using json = nlohmann::json;

namespace detail {

/// Shortest round-trip decimal form, byte-identical across runs.
inline void append_double(std::string& out, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void append_int(std::string& out, std::int64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw config_error("write failed: " + path.string());
}

inline std::string config_comment(const json& config) {
  return "# config " + config.dump() + "\n";
}

}  // namespace detail

/// Samples CSV, header `n,y,S`, full-precision decimals.
inline void write_samples_csv(const std::filesystem::path& path,
                              const SampledFunction& samples, const json& config) {
  std::string text = detail::config_comment(config);
  text += "n,y,S\n";
  text.reserve(text.size() + static_cast<std::size_t>(samples.N) * 48);
  for (int n = 0; n < samples.N; ++n) {
    detail::append_int(text, n);
    text.push_back(',');
    detail::append_double(text, samples.y(n));
    text.push_back(',');
    detail::append_double(text, samples.values[static_cast<std::size_t>(n)]);
    text.push_back('\n');
  }
  detail::write_text_file(path, text);
}

/// Reads a samples CSV back into a SampledFunction, inferring delta and L
/// from the midpoint grid and validating its shape.
inline SampledFunction read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open samples CSV: " + path.string());
  std::string line;
  std::vector<double> ys, vals;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("n,y,S", 0) != 0)
        throw config_error("samples CSV must start with header n,y,S: " + path.string());
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');  // n ignored; order is positional
    if (!std::getline(row, field, ',')) throw config_error("malformed samples row: " + line);
    ys.push_back(std::stod(field));
    if (!std::getline(row, field, ',')) throw config_error("malformed samples row: " + line);
    vals.push_back(std::stod(field));
  }
  if (!header_seen) throw config_error("samples CSV missing header: " + path.string());
  const int N = static_cast<int>(vals.size());
  if (N < 4 || N % 2 != 0)
    throw config_error("samples CSV must hold an even number of rows >= 4");
  const double delta = 2.0 * ys.front();
  if (!(delta > 0.0)) throw config_error("samples CSV: first y must be delta/2 > 0");
  for (int n = 0; n < N; ++n) {
    const double expect = (n + 0.5) * delta;
    if (std::fabs(ys[static_cast<std::size_t>(n)] - expect) > 1e-9 * (1.0 + expect))
      throw config_error("samples CSV: y grid is not uniform midpoint sampling at row " +
                         std::to_string(n));
  }
  for (double v : vals)
    if (!std::isfinite(v))
      throw config_error("samples CSV contains a non-finite S value: " + path.string());
  SampledFunction out;
  out.N = N;
  out.delta = delta;
  out.L = delta * N;
  out.values = std::move(vals);
  return out;
}

/// Spectrum CSV, header `k,u,P`, one row per bin.
inline void write_spectrum_csv(const std::filesystem::path& path,
                               const SpectrumEstimate& spec, const json& config) {
  std::string text = detail::config_comment(config);
  text += "k,u,P\n";
  text.reserve(text.size() + spec.u.size() * 48);
  for (int k = 0; k < spec.N; ++k) {
    detail::append_int(text, k);
    text.push_back(',');
    detail::append_double(text, spec.u[static_cast<std::size_t>(k)]);
    text.push_back(',');
    detail::append_double(text, spec.P[static_cast<std::size_t>(k)]);
    text.push_back('\n');
  }
  detail::write_text_file(path, text);
}

inline void write_spectrum_meta(const std::filesystem::path& path,
                                const SpectrumEstimate& spec, double B,
                                bool tau_at_lower_bound, const json& config) {
  json meta;
  meta["N"] = spec.N;
  meta["L"] = spec.L;
  meta["delta"] = spec.delta;
  meta["tau"] = spec.tau;
  meta["B"] = B;
  meta["tau_at_lower_bound"] = tau_at_lower_bound;
  meta["config"] = config;
  detail::write_text_file(path, meta.dump(2) + "\n");
}

/// Sweep CSV, header `N,tau,delta`.
inline void write_sweep_csv(const std::filesystem::path& path, const ConvergenceRecord& rec,
                            const json& config) {
  std::string text = detail::config_comment(config);
  text += "N,tau,delta\n";
  for (const auto& row : rec.rows) {
    detail::append_int(text, row.N);
    text.push_back(',');
    detail::append_double(text, row.tau);
    text.push_back(',');
    detail::append_double(text, row.delta_stat);
    text.push_back('\n');
  }
  detail::write_text_file(path, text);
}

inline json fit_to_json(const ConvergenceRecord& rec, const json& config) {
  json j;
  j["kind"] = rec.fit_kind;
  j["n_points"] = rec.fit.n_points;
  if (rec.fit.valid) {
    j["slope"] = rec.fit.slope;
    j["intercept"] = rec.fit.intercept;
    j["r2"] = rec.fit.r2;
    if (std::isfinite(rec.fit.slope_ci95_half)) j["slope_ci95_half"] = rec.fit.slope_ci95_half;
  } else {
    j["slope"] = nullptr;
    j["intercept"] = nullptr;
    j["r2"] = nullptr;
  }
  json flagged = json::array();
  for (std::size_t i = 0; i < rec.rows.size(); ++i)
    if (rec.rows[i].below_bound) flagged.push_back(i);
  j["rows_below_tau_bound"] = flagged;
  j["config"] = config;
  return j;
}

inline void write_fit_json(const std::filesystem::path& path, const ConvergenceRecord& rec,
                           const json& config) {
  detail::write_text_file(path, fit_to_json(rec, config).dump(2) + "\n");
}

inline json poisson_report_to_json(const PoissonReport& rep) {
  json checks = json::array();
  for (const auto& bin : rep.bins) {
    json b;
    b["k"] = bin.k;
    b["u"] = bin.u;
    b["residual"] = bin.residual;
    b["Fd_abs"] = bin.fd_abs;
    b["tail_estimate"] = bin.tail_estimate;
    b["threshold"] = bin.threshold;
    b["pass"] = bin.pass;
    checks.push_back(b);
  }
  json j;
  j["name"] = "poisson_residual";
  j["l_max"] = rep.l_max;
  j["max_rel_residual"] = rep.max_rel_residual;
  j["threshold"] = 1e-3;
  j["pass"] = rep.pass;
  j["bins"] = checks;
  return j;
}

inline json decay_check_to_json(const DecayCheck& chk) {
  json j;
  j["name"] = chk.name;
  j["taus"] = chk.taus;
  j["values"] = chk.values;
  j["ratios"] = chk.ratios;
  j["band"] = {chk.band_lo, chk.band_hi};
  j["pass"] = chk.pass;
  return j;
}

/// Baselines comparison CSV, header `N,method,ise`.
inline void write_baselines_csv(const std::filesystem::path& path,
                                const std::vector<std::tuple<std::int64_t, std::string, double>>& rows,
                                const json& config) {
  std::string text = detail::config_comment(config);
  text += "N,method,ise\n";
  for (const auto& [N, method, value] : rows) {
    detail::append_int(text, N);
    text.push_back(',');
    text += method;
    text.push_back(',');
    detail::append_double(text, value);
    text.push_back('\n');
  }
  detail::write_text_file(path, text);
}

}  // namespace wavedens
