// wavedens CLI: reproducible derivative-density experiments with file-based
// inputs and outputs. Subcommands: estimate, converge, tausweep, verify,
// truth, baselines. Exit codes: 0 ok, 2 configuration error, 3 numeric error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavedens/baselines.hpp"
#include "wavedens/convergence.hpp"
#include "wavedens/functions.hpp"
#include "wavedens/io.hpp"
#include "wavedens/oracle_ft.hpp"
#include "wavedens/spectrum.hpp"
#include "wavedens/truth.hpp"

namespace fs = std::filesystem;
using wavedens::json;

namespace {

json load_config_file(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      std::ifstream in(args[i + 1]);
      if (!in) throw wavedens::config_error("cannot open config file: " + args[i + 1]);
      json j;
      in >> j;
      return j;
    }
  }
  return json::object();
}

std::string default_out_dir(const json& cfg) {
  std::string out = ".";
  if (cfg.contains("out")) out = cfg["out"].get<std::string>();
  if (const char* env = std::getenv("WAVEDENS_OUT"); env != nullptr && *env != '\0')
    out = env;
  return out;
}

// config values may arrive as either strings or numbers; subcommands share
// keys (N is a single integer for estimate, a range string for converge)
std::string cfg_string(const json& cfg, const char* key, std::string def) {
  if (!cfg.contains(key)) return def;
  const json& v = cfg.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw wavedens::config_error(std::string("config key '") + key + "' must be a string");
}

std::int64_t cfg_int(const json& cfg, const char* key, std::int64_t def) {
  if (!cfg.contains(key)) return def;
  const json& v = cfg.at(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_string()) return std::stoll(v.get<std::string>());
  throw wavedens::config_error(std::string("config key '") + key + "' must be an integer");
}

double cfg_double(const json& cfg, const char* key, double def) {
  if (!cfg.contains(key)) return def;
  const json& v = cfg.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return std::stod(v.get<std::string>());
  throw wavedens::config_error(std::string("config key '") + key + "' must be a number");
}

bool cfg_bool(const json& cfg, const char* key, bool def) {
  if (!cfg.contains(key)) return def;
  return cfg.at(key).get<bool>();
}

/// N lists: "4096", "1024,2048,4096", or the range form "1024..65536x2"
/// (from 1024 to 65536, multiplying by 2).
std::vector<std::int64_t> parse_n_list(const std::string& s) {
  std::vector<std::int64_t> out;
  const auto range_pos = s.find("..");
  if (range_pos != std::string::npos) {
    const auto x_pos = s.find('x', range_pos);
    if (x_pos == std::string::npos)
      throw wavedens::config_error("bad N range '" + s + "' (expected lo..hiXfactor)");
    const std::int64_t lo = std::stoll(s.substr(0, range_pos));
    const std::int64_t hi = std::stoll(s.substr(range_pos + 2, x_pos - range_pos - 2));
    const std::int64_t factor = std::stoll(s.substr(x_pos + 1));
    if (lo < 4 || hi < lo || factor < 2)
      throw wavedens::config_error("bad N range '" + s + "'");
    for (std::int64_t n = lo; n <= hi; n *= factor) out.push_back(n);
    return out;
  }
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stoll(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (out.empty()) throw wavedens::config_error("empty N list");
  return out;
}

/// tau lists relative to the lower bound tau0: "32x..1x" (8 log-spaced
/// values), "32x..1x:12" (explicit count), "32x,16x,8x" (multipliers), or a
/// comma list of absolute values. Result is descending.
std::vector<double> parse_tau_spec(const std::string& s, double tau0) {
  std::vector<double> out;
  const auto range_pos = s.find("..");
  if (range_pos != std::string::npos) {
    auto parse_mult = [](std::string t) {
      if (!t.empty() && t.back() == 'x') t.pop_back();
      return std::stod(t);
    };
    int count = 8;
    std::string tail = s.substr(range_pos + 2);
    if (const auto colon = tail.find(':'); colon != std::string::npos) {
      count = std::stoi(tail.substr(colon + 1));
      tail = tail.substr(0, colon);
    }
    const double hi = parse_mult(s.substr(0, range_pos));
    const double lo = parse_mult(tail);
    if (!(hi > lo) || !(lo > 0.0) || count < 2)
      throw wavedens::config_error("bad tau range '" + s + "'");
    for (int i = 0; i < count; ++i) {
      const double t = std::exp(std::log(hi) + (std::log(lo) - std::log(hi)) * i / (count - 1));
      out.push_back(t * tau0);
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string item = s.substr(pos, comma - pos);
    if (!item.empty() && item.back() == 'x') {
      item.pop_back();
      out.push_back(std::stod(item) * tau0);
    } else {
      out.push_back(std::stod(item));
    }
    pos = comma + 1;
  }
  if (out.empty()) throw wavedens::config_error("empty tau list");
  return out;
}

struct CommonOpts {
  std::string fn = "sine";
  std::string out;
  std::string config_path;
  std::int64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& c, const json& cfg) {
  c.fn = cfg_string(cfg, "fn", c.fn);
  c.seed = cfg_int(cfg, "seed", c.seed);
  c.out = default_out_dir(cfg);
  cmd->add_option("--fn", c.fn, "builtin name (sine, quadratic) or samples CSV path");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--config", c.config_path, "JSON config file (flags override it)");
  cmd->add_option("--seed", c.seed, "seed recorded in the config snapshot");
}

json snapshot(const std::string& cmd, const CommonOpts& c) {
  json j;
  j["cmd"] = cmd;
  j["fn"] = c.fn;
  j["out"] = c.out;
  j["seed"] = c.seed;
  return j;
}

fs::path out_path(const CommonOpts& c, const std::string& file) {
  fs::create_directories(c.out);
  return fs::path(c.out) / file;
}

int run_estimate(const CommonOpts& c, std::int64_t N, std::optional<double> tau_opt,
                 const std::string& samples_out) {
  wavedens::SampledFunction samples;
  double B = 0.0;
  std::string b_source;
  if (c.fn.size() > 4 && c.fn.substr(c.fn.size() - 4) == ".csv") {
    samples = wavedens::read_samples_csv(c.fn);
    const double raw = wavedens::max_abs_forward_difference(samples);
    B = wavedens::estimate_bound(samples, 1e-6 * std::max(1.0, raw));
    b_source = "estimated";
  } else {
    const wavedens::AnalyticFunction fn = wavedens::find_builtin(c.fn);
    samples = wavedens::sample(fn, static_cast<int>(N));
    B = fn.B_true;
    b_source = "analytic";
  }
  const double bound = wavedens::tau_lower_bound(B, samples.L, samples.N);
  const double tau = tau_opt.value_or(bound);
  const bool at_bound = std::fabs(tau - bound) <= 1e-12 * bound;
  if (tau < bound * (1.0 - 1e-12))
    std::cerr << "warning: tau = " << tau << " is below the lower bound " << bound
              << "; the spectral range no longer covers (-B, B)\n";

  json cfg = snapshot("estimate", c);
  cfg["N"] = samples.N;
  cfg["tau"] = tau;
  cfg["B"] = B;
  cfg["B_source"] = b_source;

  const wavedens::WaveField wf = wavedens::build_wavefield(samples, tau);
  const wavedens::SpectrumEstimate spec = wavedens::scaled_dft(wf);
  wavedens::write_spectrum_csv(out_path(c, "spectrum.csv"), spec, cfg);
  wavedens::write_spectrum_meta(out_path(c, "meta.json"), spec, B, at_bound, cfg);
  if (!samples_out.empty()) wavedens::write_samples_csv(samples_out, samples, cfg);
  return 0;
}

int run_converge(const CommonOpts& c, const std::string& n_spec, int K, double alpha,
                 double eps_c, double shift, bool exact) {
  const wavedens::AnalyticFunction fn = wavedens::find_builtin(c.fn);
  const std::vector<std::int64_t> Ns = parse_n_list(n_spec);
  json cfg = snapshot("converge", c);
  cfg["N"] = n_spec;
  cfg["K"] = K;
  cfg["alpha"] = alpha;
  cfg["eps_c"] = eps_c;
  cfg["shift"] = shift;
  cfg["exact_true_integral"] = exact;
  const wavedens::ConvergenceRecord rec =
      wavedens::n_sweep(fn, Ns, K, alpha, eps_c, shift, exact);
  for (const auto& row : rec.rows)
    std::cout << "N=" << row.N << " tau=" << row.tau << " delta=" << row.delta_stat << "\n";
  if (!rec.fit.valid)
    std::cerr << "warning: fewer than two rows, slope not fitted\n";
  wavedens::write_sweep_csv(out_path(c, "converge.csv"), rec, cfg);
  wavedens::write_fit_json(out_path(c, "fit.json"), rec, cfg);
  return 0;
}

int run_tausweep(const CommonOpts& c, std::int64_t N0, const std::string& tau_spec, int K,
                 double alpha, double eps_c, double shift) {
  const wavedens::AnalyticFunction fn = wavedens::find_builtin(c.fn);
  const double tau0 = wavedens::tau_lower_bound(fn.B_true, fn.L, static_cast<int>(N0));
  const std::vector<double> taus = parse_tau_spec(tau_spec, tau0);
  json cfg = snapshot("tausweep", c);
  cfg["N"] = N0;
  cfg["taus"] = tau_spec;
  cfg["K"] = K;
  cfg["alpha"] = alpha;
  cfg["eps_c"] = eps_c;
  cfg["shift"] = shift;
  const wavedens::ConvergenceRecord rec = wavedens::tau_sweep(fn, N0, taus, K, alpha, eps_c, shift);
  for (const auto& row : rec.rows) {
    std::cout << "tau=" << row.tau << " delta=" << row.delta_stat
              << (row.below_bound ? " (below tau bound)" : "") << "\n";
    if (row.below_bound)
      std::cerr << "warning: tau = " << row.tau << " below the lower bound " << tau0
                << ", delta computed over " << row.neighborhoods_used << " neighborhoods\n";
  }
  wavedens::write_sweep_csv(out_path(c, "tausweep.csv"), rec, cfg);
  wavedens::write_fit_json(out_path(c, "fit.json"), rec, cfg);
  return 0;
}

int run_verify(const CommonOpts& c, std::int64_t N, int l_max, bool decay,
               std::int64_t max_evals) {
  const wavedens::AnalyticFunction fn = wavedens::find_builtin(c.fn);
  wavedens::QuadratureOptions opts;
  if (max_evals > 0) opts.max_evals = max_evals;
  json cfg = snapshot("verify", c);
  cfg["N"] = N;
  cfg["l_max"] = l_max;
  cfg["decay"] = decay;

  json checks = json::array();
  bool all_pass = true;
  std::string first_fail;

  const wavedens::PoissonReport rep = wavedens::poisson_check(fn, static_cast<int>(N), l_max, opts);
  checks.push_back(wavedens::poisson_report_to_json(rep));
  if (!rep.pass) {
    all_pass = false;
    first_fail = "poisson_residual";
  }
  std::cout << "poisson_residual: max residual/(1+|F^D|) = " << rep.max_rel_residual
            << (rep.pass ? " PASS" : " FAIL") << "\n";

  if (decay) {
    const bool is_quad = c.fn == "quadratic";
    const auto nostat = wavedens::no_stationary_point_decay(
        fn, 1.35 * fn.B_true, 0.05 * fn.B_true, is_quad ? 32 : 64, 4, opts);
    checks.push_back(wavedens::decay_check_to_json(nostat));
    if (!nostat.pass) { all_pass = false; if (first_fail.empty()) first_fail = nostat.name; }
    std::cout << nostat.name << (nostat.pass ? ": PASS" : ": FAIL") << "\n";
    // interior probe window at the middle of the image of s
    const double center = is_quad ? 0.5 : 0.0;
    const auto res = wavedens::stationary_phase_residual_decay(
        fn, center, is_quad ? 0.06 : 0.3, 32, 4, opts);
    checks.push_back(wavedens::decay_check_to_json(res));
    if (!res.pass) { all_pass = false; if (first_fail.empty()) first_fail = res.name; }
    std::cout << res.name << (res.pass ? ": PASS" : ": FAIL") << "\n";
    if (!is_quad) {
      // cross terms need multiple stationary points per bin
      const auto cross = wavedens::crossterm_integral_decay(fn, center, 1.2, 12, 64, 4, opts);
      checks.push_back(wavedens::decay_check_to_json(cross));
      if (!cross.pass) { all_pass = false; if (first_fail.empty()) first_fail = cross.name; }
      std::cout << cross.name << (cross.pass ? ": PASS" : ": FAIL") << "\n";
    }
  }

  json report;
  report["config"] = cfg;
  report["checks"] = checks;
  report["pass"] = all_pass;
  wavedens::detail::write_text_file(out_path(c, "verify.json"), report.dump(2) + "\n");
  if (!all_pass) throw wavedens::numeric_error("verification check failed: " + first_fail);
  return 0;
}

int run_truth(const CommonOpts& c, double u, int grid) {
  const wavedens::AnalyticFunction fn = wavedens::find_builtin(c.fn);
  const wavedens::RootSet rs = wavedens::find_roots(fn, u, grid);
  std::cout << "fn: " << fn.name << "\n";
  std::cout << "u: " << u << "\n";
  std::cout << "roots:";
  for (double x : rs.roots) std::cout << " " << x;
  std::cout << "\n";
  std::cout << "density_bruteforce: " << wavedens::density_bruteforce(fn, u, grid) << "\n";
  if (fn.has_density()) std::cout << "density_closed_form: " << fn.density(u) << "\n";
  return 0;
}

int run_baselines(const CommonOpts& c, const std::string& n_spec, int grid) {
  const wavedens::AnalyticFunction fn = wavedens::find_builtin(c.fn);
  const std::vector<std::int64_t> Ns = parse_n_list(n_spec);
  json cfg = snapshot("baselines", c);
  cfg["N"] = n_spec;
  cfg["grid"] = grid;
  cfg["metric"] = "ISE (fixed design)";
  std::cerr << "note: sample locations are fixed, so the metric is ISE for one\n"
               "deterministic design; classical IMSE rates assume random samples and\n"
               "are not directly commensurate\n";
  std::vector<std::tuple<std::int64_t, std::string, double>> rows;
  const double eps = 0.05 * fn.B_true;
  for (std::int64_t N : Ns) {
    const wavedens::SampledFunction smp = wavedens::sample(fn, static_cast<int>(N));
    const wavedens::DerivativeSamples ds = wavedens::derivative_samples(smp);
    const int bins = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(N))));
    const auto hist = wavedens::histogram_density(ds, bins, ds.min(), ds.max());
    rows.emplace_back(N, "histogram",
                      wavedens::ise([&hist](double u) { return hist(u); }, fn, grid, eps));
    const double h = wavedens::silverman_bandwidth(ds);
    rows.emplace_back(N, "kernel", wavedens::ise(
        [&ds, h](double u) { return wavedens::kernel_density(ds, h, u); }, fn, grid, eps));
    std::cout << "N=" << N << " done\n";
  }
  wavedens::write_baselines_csv(out_path(c, "baselines.csv"), rows, cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const json cfg = load_config_file(args);

    CLI::App app{"wavedens: derivative-density estimation from uniform samples"};
    app.require_subcommand(1);

    // estimate
    auto* est = app.add_subcommand("estimate", "spectrum CSV + metadata JSON");
    CommonOpts est_c;
    std::int64_t est_N = cfg_int(cfg, "N", 4096);
    double est_tau = cfg_double(cfg, "tau", -1.0);
    std::string est_samples_out = cfg_string(cfg, "samples_out", "");
    add_common(est, est_c, cfg);
    est->add_option("--N", est_N, "sample count (even, >= 4)");
    auto* est_tau_opt =
        est->add_option("--tau", est_tau, "explicit tau (default: lower bound BL/(pi N))");
    est->add_option("--samples-out", est_samples_out, "also write the samples CSV here");

    // converge
    auto* con = app.add_subcommand("converge", "N-sweep CSV + slope fit JSON");
    CommonOpts con_c;
    std::string con_N = cfg_string(cfg, "N", "1024..65536x2");
    int con_K = static_cast<int>(cfg_int(cfg, "K", 255));
    double con_alpha = cfg_double(cfg, "alpha", 0.0);
    double con_eps = cfg_double(cfg, "eps_c", 0.0);
    double con_shift = cfg_double(cfg, "shift", 0.0);
    bool con_exact = cfg_bool(cfg, "exact_true_integral", false);
    add_common(con, con_c, cfg);
    con->add_option("--N", con_N, "N list: single, comma list, or lo..hiXf range");
    con->add_option("--K", con_K, "number of neighborhoods");
    con->add_option("--alpha", con_alpha, "neighborhood half-width (default 0.4 * spacing)");
    con->add_option("--eps-c", con_eps, "C exclusion margin (default 0.01 B)");
    con->add_option("--shift", con_shift, "center shift in units of the spacing");
    con->add_flag("--exact-true", con_exact, "subtract the exact density integral");

    // tausweep
    auto* tsw = app.add_subcommand("tausweep", "tau-sweep CSV + linear fit JSON");
    CommonOpts tsw_c;
    std::int64_t tsw_N = cfg_int(cfg, "N", 65536);
    std::string tsw_taus = cfg_string(cfg, "taus", "32x..1x:8");
    int tsw_K = static_cast<int>(cfg_int(cfg, "K", 255));
    double tsw_alpha = cfg_double(cfg, "alpha", 0.0);
    double tsw_eps = cfg_double(cfg, "eps_c", 0.0);
    double tsw_shift = cfg_double(cfg, "shift", 0.0);
    add_common(tsw, tsw_c, cfg);
    tsw->add_option("--N", tsw_N, "fixed N0 (even)");
    tsw->add_option("--taus", tsw_taus, "descending taus: 32x..1x[:count], list, or x-multipliers");
    tsw->add_option("--K", tsw_K, "number of neighborhoods");
    tsw->add_option("--alpha", tsw_alpha, "neighborhood half-width");
    tsw->add_option("--eps-c", tsw_eps, "C exclusion margin");
    tsw->add_option("--shift", tsw_shift, "center shift in units of the spacing");

    // verify
    auto* ver = app.add_subcommand("verify", "Poisson-identity and decay checks, JSON report");
    CommonOpts ver_c;
    std::int64_t ver_N = cfg_int(cfg, "N", 32);
    int ver_lmax = static_cast<int>(cfg_int(cfg, "l_max", 50));
    bool ver_decay = cfg_bool(cfg, "decay", false);
    std::int64_t ver_maxevals = cfg_int(cfg, "max_evals", 0);
    add_common(ver, ver_c, cfg);
    ver->add_option("--N", ver_N, "sample count (<= 256 for the quadrature oracle)");
    ver->add_option("--lmax", ver_lmax, "aliasing truncation order");
    ver->add_flag("--decay", ver_decay, "also run the tau-decay checks (slower)");
    ver->add_option("--max-evals", ver_maxevals, "quadrature evaluation budget per integral");

    // truth
    auto* tru = app.add_subcommand("truth", "spot-check the density oracle");
    CommonOpts tru_c;
    double tru_u = cfg_double(cfg, "u", 0.0);
    int tru_grid = static_cast<int>(cfg_int(cfg, "grid", 100000));
    add_common(tru, tru_c, cfg);
    tru->add_option("--u", tru_u, "derivative value to query")->required();
    tru->add_option("--grid", tru_grid, "root-scan grid size");

    // baselines
    auto* bas = app.add_subcommand("baselines", "histogram/kernel ISE comparison CSV");
    CommonOpts bas_c;
    std::string bas_N = cfg_string(cfg, "N", "1024..65536x2");
    int bas_grid = static_cast<int>(cfg_int(cfg, "grid", 2048));
    add_common(bas, bas_c, cfg);
    bas->add_option("--N", bas_N, "N list");
    bas->add_option("--grid", bas_grid, "ISE Riemann grid size");

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }

    if (est->parsed()) {
      const bool tau_given = est_tau_opt->count() > 0 || cfg.contains("tau");
      if (tau_given && !(est_tau > 0.0))
        throw wavedens::config_error("estimate: tau must be > 0");
      return run_estimate(est_c, est_N,
                          tau_given ? std::optional<double>(est_tau) : std::nullopt,
                          est_samples_out);
    }
    if (con->parsed())
      return run_converge(con_c, con_N, con_K, con_alpha, con_eps, con_shift, con_exact);
    if (tsw->parsed())
      return run_tausweep(tsw_c, tsw_N, tsw_taus, tsw_K, tsw_alpha, tsw_eps, tsw_shift);
    if (ver->parsed()) return run_verify(ver_c, ver_N, ver_lmax, ver_decay, ver_maxevals);
    if (tru->parsed()) return run_truth(tru_c, tru_u, tru_grid);
    if (bas->parsed()) return run_baselines(bas_c, bas_N, bas_grid);
    return 2;
  } catch (const wavedens::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wavedens::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
