#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kslab/errors.hpp"
#include "kslab/evolution.hpp"
#include "kslab/functionals.hpp"
#include "kslab/io.hpp"
#include "kslab/norms.hpp"
#include "kslab/profiles.hpp"
#include "kslab/rate.hpp"
#include "kslab/spectrum.hpp"

namespace fs = std::filesystem;
using namespace kslab;

namespace {

// ---------------------------------------------------------------- plumbing

double wall_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Flat `key = value` file; keys are the long option names without dashes.
// Lines are injected as --key=value right after the subcommand, so explicit
// command-line flags override them (every option takes the last occurrence).
std::vector<std::string> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path);
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value, got '" + line + "'", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (value.empty()) throw ParseError("empty value for key '" + key + "'", line_no);
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

// Pull --config out of the raw arguments and splice the file's settings in
// right after the subcommand token.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;
  std::size_t sub = rest.size();
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (!rest[i].empty() && rest[i][0] != '-') {
      sub = i;
      break;
    }
  }
  if (sub == rest.size()) throw ConfigError("--config given but no subcommand to apply it to");
  std::vector<std::string> injected = read_config_file(config_path);
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(sub) + 1, injected.begin(), injected.end());
  return rest;
}

using KV = std::vector<std::pair<std::string, std::string>>;

void finish_manifest(RunManifest& man, const std::string& dir,
                     std::chrono::steady_clock::time_point t0) {
  std::sort(man.config.begin(), man.config.end());
  man.wall_seconds = wall_since(t0);
  save_manifest(man, dir + "/manifest.json");
}

struct AGrid {
  double lo = 0.0, hi = 0.0, step = 0.0;
};

AGrid parse_a_grid(const std::string& s) {
  AGrid g;
  char c1 = 0, c2 = 0;
  std::istringstream is(s);
  if (!(is >> g.lo >> c1 >> g.hi >> c2 >> g.step) || c1 != ':' || c2 != ':' || !is.eof())
    throw ConfigError("--a-grid wants lo:hi:step, got '" + s + "'");
  if (!(g.step > 0.0) || !(g.lo <= g.hi)) throw ConfigError("--a-grid needs lo <= hi and step > 0");
  return g;
}

// For N >= 3 grid entries are fractions of the finite dilation bound A; for
// N = 2 (A infinite) they are absolute dilation parameters.
std::vector<double> expand_a_grid(const AGrid& g, const SteadyProfile& p) {
  std::vector<double> as;
  const bool fractional = std::isfinite(p.A);
  for (int k = 0;; ++k) {
    double f = g.lo + k * g.step;
    if (f > g.hi + 1e-12) break;
    as.push_back(fractional ? f * p.A : f);
  }
  if (as.empty()) throw ConfigError("--a-grid expands to no samples");
  return as;
}

GridFn build_u0(const std::string& spec, const ModelParams& params, GridPtr grid,
                const SteadyProfile& p, std::optional<double> a) {
  if (spec == "linear")
    return GridFn::sample(grid, [&](double x) { return params.m * x; });
  if (spec.rfind("power:", 0) == 0) {
    double pw = 0.0;
    try {
      std::size_t pos = 0;
      pw = std::stod(spec.substr(6), &pos);
      if (pos != spec.size() - 6) throw std::invalid_argument(spec);
    } catch (const std::exception&) {
      throw ConfigError("bad exponent in u0 spec '" + spec + "'");
    }
    if (pw < 1.0) throw ConfigError("u0 power exponent must be >= 1 to keep a finite slope at 0");
    return GridFn::sample(grid, [&](double x) { return params.m * std::pow(x, pw); });
  }
  if (spec.rfind("steady-perturbed:", 0) == 0) {
    double eps = 0.0;
    try {
      std::size_t pos = 0;
      eps = std::stod(spec.substr(17), &pos);
      if (pos != spec.size() - 17) throw std::invalid_argument(spec);
    } catch (const std::exception&) {
      throw ConfigError("bad epsilon in u0 spec '" + spec + "'");
    }
    if (!a) throw ConfigError("steady-perturbed u0 needs a subcritical mass (no steady state here)");
    double av = *a;
    return GridFn::sample(grid, [&](double x) { return eval_U(p, av, x) + eps * x * (1.0 - x); });
  }
  throw ConfigError("unknown u0 family '" + spec + "' (linear | power:p | steady-perturbed:eps)");
}

// ---------------------------------------------------------------- steady

int cmd_steady(int N, double tol, const std::string& out) {
  auto t0 = std::chrono::steady_clock::now();
  SteadyProfile p = build_profile(N, tol);
  std::printf("N=%d M=%s A=%s tol=%s\n", N, format_double(p.M).c_str(),
              format_double(p.A).c_str(), format_double(tol).c_str());
  if (!out.empty()) {
    fs::create_directories(out);
    save_profile_csv(p, out + "/profile.csv");
    RunManifest man;
    man.command = "steady";
    man.config = {{"N", std::to_string(N)}, {"tol", format_double(tol)}, {"out", out}};
    man.files = {"profile.csv"};
    man.status = "completed";
    finish_manifest(man, out, t0);
  }
  return 0;
}

// ---------------------------------------------------------------- lambda1

int cmd_lambda1(int N, std::optional<double> m, std::optional<double> a_opt,
                const std::string& a_grid, std::size_t n, double grading, double tol,
                const std::string& out) {
  auto t0 = std::chrono::steady_clock::now();
  int given = (m ? 1 : 0) + (a_opt ? 1 : 0) + (a_grid.empty() ? 0 : 1);
  if (given != 1) throw ConfigError("give exactly one of --m, --a, --a-grid");

  SteadyProfile p = build_profile(N, tol);
  std::vector<double> as;
  if (m) {
    if (!(*m > 0.0))
      throw DomainError("m = 0 has steady state U_0 = 0 with no spectral problem; a must be > 0");
    as.push_back(solve_a_of_m(p, *m));
  } else if (a_opt) {
    as.push_back(*a_opt);
  } else {
    as = expand_a_grid(parse_a_grid(a_grid), p);
  }

  GridPtr grid = Grid::make(n, grading);
  std::vector<Lambda1Row> rows;
  SpectralResult last;
  for (double a : as) {
    SpectralResult r = solve_lambda1(grid, a, p);
    rows.push_back({N, a, n, r.lambda1, r.lambda2 - r.lambda1, static_cast<std::size_t>(r.iterations)});
    std::printf("N=%d a=%s lambda1=%s gap=%s refinement_gap=%s\n", N, format_double(a).c_str(),
                format_double(r.lambda1).c_str(), format_double(r.lambda2 - r.lambda1).c_str(),
                format_double(r.refinement_gap).c_str());
    last = std::move(r);
  }
  if (!out.empty()) {
    fs::create_directories(out);
    save_lambda1_csv(rows, out + "/lambda1.csv");
    RunManifest man;
    man.command = "lambda1";
    man.config = {{"N", std::to_string(N)},
                  {"n", std::to_string(n)},
                  {"grading", format_double(grading)},
                  {"tol", format_double(tol)},
                  {"out", out}};
    if (m) man.config.push_back({"m", format_double(*m)});
    if (a_opt) man.config.push_back({"a", format_double(*a_opt)});
    if (!a_grid.empty()) man.config.push_back({"a-grid", a_grid});
    man.files = {"lambda1.csv"};
    if (as.size() == 1) {
      save_phi1_csv(last.phi1, out + "/phi1.csv");
      man.files.push_back("phi1.csv");
    }
    man.status = "completed";
    finish_manifest(man, out, t0);
  }
  return 0;
}

// ---------------------------------------------------------------- evolve

struct EvolveOpts {
  int N = 2;
  double m = 1.0;
  std::string u0 = "linear";
  std::size_t n = 1024;
  double grading = 1.0;
  double dt = 1e-4;
  double t_end = 1.0;
  std::string scheme = "imex";
  unsigned seed = 0;  // reserved for randomized u0 families
  std::string out;
  bool expect_subcritical = false;
  bool dump_all_snapshots = false;
  double dense_until = 1.0;
  int snapshot_every = 10;
  double snapshot_growth = 1.2;
  double sup_threshold = 1e3;
  int max_halvings = 10;
};

int cmd_evolve(const EvolveOpts& o) {
  auto t0 = std::chrono::steady_clock::now();
  if (o.out.empty()) throw ConfigError("evolve needs --out");
  if (o.m < 0.0) throw ConfigError("m must be >= 0");
  if (o.n < 8) throw ConfigError("n must be >= 8");
  if (!(o.grading >= 1.0)) throw ConfigError("grading must be >= 1");
  if (!(o.dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(o.t_end >= o.dt)) throw ConfigError("t_end must be >= dt");
  if (o.scheme != "imex" && o.scheme != "explicit") throw ConfigError("scheme is imex or explicit");

  ModelParams params{o.N, o.m};
  params.validate();
  SteadyProfile p = build_profile(o.N, 1e-10);

  // subcritical masses get distance-to-steady-state columns; otherwise NaN
  std::optional<double> a;
  if (o.m == 0.0) {
    a = 0.0;
  } else {
    try {
      a = solve_a_of_m(p, o.m);
    } catch (const DomainError&) {
    } catch (const SupercriticalError&) {
    }
  }

  GridPtr grid = Grid::make(o.n, o.grading);
  GridFn u0 = build_u0(o.u0, params, grid, p, a);

  EvolveConfig cfg;
  cfg.dt = o.dt;
  cfg.t_end = o.t_end;
  cfg.scheme = (o.scheme == "imex") ? EvolveConfig::Scheme::imex : EvolveConfig::Scheme::explicit_euler;
  cfg.snapshot_every = o.snapshot_every;
  cfg.dense_until = o.dense_until;
  cfg.snapshot_growth = o.snapshot_growth;
  cfg.sup_threshold = o.sup_threshold;
  cfg.max_halvings = o.max_halvings;
  cfg.validate();

  fs::create_directories(o.out);
  fs::create_directories(o.out + "/snapshots");

  GridFn steady;
  if (a) steady = GridFn::sample(grid, [&](double x) { return eval_U(p, *a, x); });

  const double nan = std::nan("");
  std::vector<SeriesRow> rows;
  auto hook = [&](const PdeState& s) {
    SeriesRow r;
    r.t = s.t;
    if (a) {
      GridFn diff = s.u - steady;
      r.normL = norm_L(diff, params.q());
      r.normC1 = norm_C1(diff);
    } else {
      r.normL = nan;
      r.normC1 = nan;
    }
    try {
      r.lyapunov = (o.N == 2) ? G_energy(s.u) : F_energy(s.u, params);
    } catch (const DomainError&) {
      r.lyapunov = nan;
    }
    double ms = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < s.u.grid->cells(); ++c) ms = std::min(ms, s.u.cell_slope(c));
    r.min_ux = ms;
    double sup = 0.0;
    for (std::size_t i = 1; i < s.u.size(); ++i)
      sup = std::max(sup, s.u[i] / s.u.grid->nodes[i]);
    r.sup_ratio = sup;
    rows.push_back(r);
    if (o.dump_all_snapshots || s.t == 0.0 || s.t >= o.dense_until) {
      char name[64];
      std::snprintf(name, sizeof(name), "u_%.6f.csv", s.t);
      save_snapshot_csv(s.u, o.out + "/snapshots/" + name);
    }
  };

  std::string status = "completed";
  bool supercritical = false;
  try {
    Trajectory traj = run(u0, params, cfg, hook);
    supercritical = traj.supercritical;
    if (supercritical) status = "supercritical-detected";
    // final state file regardless of the snapshot thinning above
    char name[64];
    std::snprintf(name, sizeof(name), "u_%.6f.csv", traj.times.back());
    save_snapshot_csv(traj.snapshots.back(), o.out + "/snapshots/" + name);
  } catch (const InstabilityError& e) {
    status = "unstable";
    std::fprintf(stderr, "instability: %s\n", e.what());
  }

  save_series_csv(rows, o.out + "/series.csv");

  RunManifest man;
  man.command = "evolve";
  man.config = {{"N", std::to_string(o.N)},
                {"m", format_double(o.m)},
                {"u0", o.u0},
                {"n", std::to_string(o.n)},
                {"grading", format_double(o.grading)},
                {"dt", format_double(o.dt)},
                {"t-end", format_double(o.t_end)},
                {"scheme", o.scheme},
                {"seed", std::to_string(o.seed)},
                {"dense-until", format_double(o.dense_until)},
                {"snapshot-every", std::to_string(o.snapshot_every)},
                {"snapshot-growth", format_double(o.snapshot_growth)},
                {"sup-threshold", format_double(o.sup_threshold)},
                {"max-halvings", std::to_string(o.max_halvings)},
                {"out", o.out}};
  man.files = {"series.csv"};
  for (const auto& e : fs::directory_iterator(o.out + "/snapshots"))
    man.files.push_back("snapshots/" + e.path().filename().string());
  std::sort(man.files.begin() + 1, man.files.end());
  man.status = status;
  finish_manifest(man, o.out, t0);

  std::printf("status=%s rows=%zu dt=%s\n", status.c_str(), rows.size(), format_double(o.dt).c_str());
  if (status == "unstable") return 3;
  if (supercritical && o.expect_subcritical) return 4;
  return 0;
}

// ---------------------------------------------------------------- rate

int cmd_rate(const std::string& run_dir, const std::string& which, const std::string& window_spec,
             double lambda_frac, std::optional<int> N_opt, std::optional<double> m_opt,
             std::size_t n, double floor) {
  std::vector<SeriesRow> series = read_series_csv(run_dir + "/series.csv");
  NormSeries s;
  s.floor = floor;
  for (const auto& r : series) {
    s.times.push_back(r.t);
    s.normL.push_back(r.normL);
    s.normC1.push_back(r.normC1);
  }

  int N = 0;
  double m = 0.0;
  if (N_opt && m_opt) {
    N = *N_opt;
    m = *m_opt;
  } else {
    std::ifstream is(run_dir + "/manifest.json");
    if (!is) throw ConfigError("no manifest in " + run_dir + "; give --N and --m");
    nlohmann::json j;
    try {
      is >> j;
      N = std::stoi(j.at("config").at("N").get<std::string>());
      m = std::stod(j.at("config").at("m").get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("cannot read N and m from manifest: ") + e.what());
    }
    if (N_opt) N = *N_opt;
    if (m_opt) m = *m_opt;
  }
  if (!(m > 0.0)) throw DomainError("rate comparison needs a subcritical mass m > 0");

  std::optional<std::pair<double, double>> window;
  if (!window_spec.empty()) {
    double lo = 0.0, hi = 0.0;
    char c = 0;
    std::istringstream ws(window_spec);
    if (!(ws >> lo >> c >> hi) || c != ':' || !ws.eof())
      throw ConfigError("--window wants lo:hi, got '" + window_spec + "'");
    window = {lo, hi};
  }

  SteadyProfile p = build_profile(N, 1e-10);
  double a = solve_a_of_m(p, m);
  SpectralResult spec = solve_lambda1(Grid::make(n), a, p);
  double dUa1 = eval_dU(p, a, 1.0);
  double q = 2.0 / N;
  double comparator = theoretical_rate(a, lambda_frac, spec, p);

  std::vector<RateFitRecord> records;
  std::optional<RateFit> fitL, fitC1;
  if (which == "L" || which == "both")
    fitL = fit_rate(s, WhichNorm::L, window);
  if (which == "C1" || which == "both")
    fitC1 = fit_rate(s, WhichNorm::C1, window);
  if (!fitL && !fitC1) throw ConfigError("--which is L, C1 or both");

  std::printf("%-5s %-22s %-12s %-10s %-20s %s\n", "which", "slope", "stderr", "r2", "window", "samples");
  for (const auto* f : {fitL ? &*fitL : nullptr, fitC1 ? &*fitC1 : nullptr}) {
    if (!f) continue;
    std::printf("%-5s %-22s %-12.3g %-10.6f [%g,%g] %zu\n", f->which == WhichNorm::L ? "L" : "C1",
                format_double(f->slope).c_str(), f->slope_stderr, f->r_squared, f->window_lo,
                f->window_hi, f->samples);
    records.push_back({*f, spec.lambda1, dUa1, comparator});
  }
  std::printf("comparators: %g*(lambda1-1)*dUa1^q=%s  (lambda1-1)*dUa1^q=%s  lambda1*dUa1^q=%s\n",
              lambda_frac, format_double(comparator).c_str(),
              format_double((spec.lambda1 - 1.0) * std::pow(dUa1, q)).c_str(),
              format_double(spec.lambda1 * std::pow(dUa1, q)).c_str());
  if (fitL && fitC1) {
    ConsistencyReport rep = rate_consistency(*fitL, *fitC1);
    std::printf("consistency: |slope_L - slope_C1| = %s vs 3*stderr = %s -> %s\n",
                format_double(rep.difference).c_str(), format_double(rep.tolerance).c_str(),
                rep.pass ? "pass" : "FAIL");
  }
  save_ratefit_json(records, run_dir + "/ratefit.json");
  return 0;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(int N, const std::string& a_grid, std::size_t n, double grading, unsigned jobs,
              const std::string& out) {
  auto t0 = std::chrono::steady_clock::now();
  if (out.empty()) throw ConfigError("sweep needs --out");
  if (a_grid.empty()) throw ConfigError("sweep needs --a-grid");
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

  SteadyProfile p = build_profile(N, 1e-10);
  std::vector<double> as = expand_a_grid(parse_a_grid(a_grid), p);
  fs::create_directories(out);

  std::vector<Lambda1Row> rows(as.size());
  std::vector<std::string> failures(as.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= as.size()) return;
      char sub[32];
      std::snprintf(sub, sizeof(sub), "a_%03zu", i);
      std::string dir = out + "/" + sub;
      fs::create_directories(dir);
      try {
        SpectralResult r = solve_lambda1(Grid::make(n, grading), as[i], p);
        rows[i] = {N, as[i], n, r.lambda1, r.lambda2 - r.lambda1,
                   static_cast<std::size_t>(r.iterations)};
        save_phi1_csv(r.phi1, dir + "/phi1.csv");
        save_lambda1_csv({rows[i]}, dir + "/lambda1.csv");
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < std::min<std::size_t>(jobs, as.size()); ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < as.size(); ++i)
    if (!failures[i].empty())
      throw NumericalError("sweep sample a=" + format_double(as[i]) + " failed: " + failures[i]);

  save_lambda1_csv(rows, out + "/lambda1.csv");
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (!(rows[i + 1].lambda1 < rows[i].lambda1)) monotone = false;
  for (const auto& r : rows)
    std::printf("N=%d a=%s lambda1=%s gap=%s\n", r.N, format_double(r.a).c_str(),
                format_double(r.lambda1).c_str(), format_double(r.gap).c_str());
  if (!monotone) std::printf("warning: lambda1 not strictly decreasing along the sweep\n");

  RunManifest man;
  man.command = "sweep";
  man.config = {{"N", std::to_string(N)}, {"a-grid", a_grid},      {"n", std::to_string(n)},
                {"grading", format_double(grading)}, {"jobs", std::to_string(jobs)}, {"out", out}};
  man.files = {"lambda1.csv"};
  for (std::size_t i = 0; i < as.size(); ++i) {
    char sub[32];
    std::snprintf(sub, sizeof(sub), "a_%03zu", i);
    man.files.push_back(std::string(sub) + "/lambda1.csv");
    man.files.push_back(std::string(sub) + "/phi1.csv");
  }
  man.status = "completed";
  finish_manifest(man, out, t0);
  return 0;
}

// ---------------------------------------------------------------- validate

int cmd_validate() {
  int failed = 0;
  auto group = [&](const char* name, auto&& body) {
    try {
      std::string detail = body();
      std::printf("%-28s pass  %s\n", name, detail.c_str());
    } catch (const std::exception& e) {
      std::printf("%-28s FAIL  %s\n", name, e.what());
      ++failed;
    }
  };
  auto expect = [](bool ok, const std::string& msg) {
    if (!ok) throw NumericalError(msg);
  };

  group("steady-profiles", [&]() {
    SteadyProfile p2 = build_profile(2, 1e-10);
    double err = 0.0;
    for (int i = 1; i <= 100; ++i) {
      double x = 64.0 * i / 100.0;
      err = std::max(err, std::abs(eval_U1(p2, x) - x / (1.0 + x / 2.0)));
    }
    expect(err <= 1e-8, "closed form mismatch " + format_double(err));
    expect(std::abs(p2.M - 2.0) <= 1e-9, "M(2) = " + format_double(p2.M));
    double a = solve_a_of_m(p2, 1.0);
    expect(std::abs(a - 2.0) <= 1e-8, "a(1) = " + format_double(a));
    SteadyProfile p3 = build_profile(3, 1e-10);
    expect(std::isfinite(p3.A) && p3.A > 1.0, "A(3) not finite");
    return "closed form, mass inversion, finite A";
  });

  group("weighted-norms", [&]() {
    auto bump = [](double x) { return x * (1.0 - x) * (2.0 - x); };
    auto g = Grid::make(256);
    double c = norm_H(GridFn::sample(g, bump), 1.0);
    double c2 = norm_H(GridFn::sample(Grid::make(512), bump), 1.0);
    expect(std::isfinite(c) && std::isfinite(c2), "energy norm not finite");
    expect(std::abs(c - c2) < 1e-3 * c, "no refinement convergence");
    double s = norm_L(GridFn::sample(g, [](double x) { return x; }), 1.0);
    expect(std::abs(s - std::sqrt(0.5)) <= 1e-12, "norm_L(x) off: " + format_double(s));
    return "quadrature identities, refinement";
  });

  group("spectral-pencil", [&]() {
    SteadyProfile p = build_profile(2, 1e-10);
    SpectralResult r = solve_lambda1(Grid::make(512), 2.0, p);
    expect(r.lambda1 > 1.0, "lambda1 = " + format_double(r.lambda1) + " <= 1");
    expect(r.lambda2 > r.lambda1, "eigenvalue order broken");
    SpectralPencil pen = assemble(Grid::make(512), 2.0, p);
    double rq = rayleigh_quotient(pen, r.phi1);
    expect(std::abs(rq - r.lambda1) <= 1e-8 * rq, "Rayleigh mismatch");
    return "lambda1 = " + format_double(r.lambda1);
  });

  group("identity-residuals", [&]() {
    SteadyProfile p = build_profile(2, 1e-10);
    auto g = Grid::make(512);
    auto h = GridFn::sample(g, [](double x) { return x * (1.0 - x) * (1.5 - x); });
    double b = beesack_residual(h, 2.0, p);
    double l = lemma41_residual(h, 2.0, p);
    expect(b <= 1e-3, "quadratic-form identity residual " + format_double(b));
    expect(l <= 1e-3, "integrated identity residual " + format_double(l));
    return "residuals " + format_double(b) + ", " + format_double(l);
  });

  group("evolution-fixed-point", [&]() {
    SteadyProfile p = build_profile(2, 1e-10);
    ModelParams params{2, 1.0};
    auto g = Grid::make(256);
    double a = solve_a_of_m(p, 1.0);
    GridFn u0 = GridFn::sample(g, [&](double x) { return eval_U(p, a, x); });
    EvolveConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.1;
    Trajectory traj = run(u0, params, cfg);
    double drift = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i)
      drift = std::max(drift, std::abs(traj.snapshots.back()[i] - u0[i]));
    expect(drift <= 1e-5, "steady state drift " + format_double(drift));
    return "drift " + format_double(drift);
  });

  group("comparison-principle", [&]() {
    ModelParams params{2, 1.0};
    auto g = Grid::make(256);
    GridFn lo = GridFn::sample(g, [](double x) { return x * x; });
    GridFn hi = GridFn::sample(g, [](double x) { return x; });
    EvolveConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.2;
    Trajectory tlo = run(lo, params, cfg);
    Trajectory thi = run(hi, params, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < g->nodes.size(); ++i)
      worst = std::min(worst, thi.snapshots.back()[i] - tlo.snapshots.back()[i]);
    expect(worst >= -1e-8, "ordering violated by " + format_double(-worst));
    return "ordering preserved";
  });

  group("lyapunov-monotone", [&]() {
    ModelParams params{2, 1.0};
    auto g = Grid::make(256);
    GridFn u0 = GridFn::sample(g, [](double x) { return x; });
    EvolveConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.2;
    Trajectory traj = run(u0, params, cfg);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& u : traj.snapshots) {
      double v = G_energy(u);
      expect(v <= prev + 1e-8 * (1.0 + std::abs(v)), "energy increased");
      prev = v;
    }
    return "nonincreasing along a run";
  });

  if (failed > 0) throw NumericalError(std::to_string(failed) + " validation group(s) failed");
  std::printf("all groups pass\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  CLI::App app{"numerical laboratory for a degenerate parabolic boundary-mass problem"};
  app.require_subcommand(1);
  auto last = [](CLI::Option* o) { return o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };

  // steady
  auto* steady = app.add_subcommand("steady", "tabulate the steady-state profile family");
  int s_N = 2;
  double s_tol = 1e-10;
  std::string s_out;
  last(steady->add_option("--N", s_N, "spatial dimension, >= 2")->required());
  last(steady->add_option("--tol", s_tol, "profile integration tolerance"));
  last(steady->add_option("--out", s_out, "output directory (profile.csv, manifest.json)"));

  // lambda1
  auto* lam = app.add_subcommand("lambda1", "smallest constant of the weighted spectral problem");
  int l_N = 2;
  std::optional<double> l_m, l_a;
  std::string l_agrid, l_out;
  std::size_t l_n = 1024;
  double l_grading = 1.0, l_tol = 1e-10;
  last(lam->add_option("--N", l_N, "spatial dimension")->required());
  last(lam->add_option("--m", l_m, "boundary mass (subcritical)"));
  last(lam->add_option("--a", l_a, "dilation parameter directly"));
  last(lam->add_option("--a-grid", l_agrid, "lo:hi:step (fractions of A when A is finite)"));
  last(lam->add_option("--n", l_n, "grid cells"));
  last(lam->add_option("--grading", l_grading, "mesh grading exponent >= 1"));
  last(lam->add_option("--tol", l_tol, "profile tolerance"));
  last(lam->add_option("--out", l_out, "output directory"));

  // evolve
  auto* evo = app.add_subcommand("evolve", "time-step the boundary-mass problem");
  EvolveOpts e;
  last(evo->add_option("--N", e.N, "spatial dimension")->required());
  last(evo->add_option("--m", e.m, "boundary mass")->required());
  last(evo->add_option("--u0", e.u0, "initial data: linear | power:p | steady-perturbed:eps"));
  last(evo->add_option("--n", e.n, "grid cells"));
  last(evo->add_option("--grading", e.grading, "mesh grading exponent >= 1"));
  last(evo->add_option("--dt", e.dt, "time step"));
  last(evo->add_option("--t-end", e.t_end, "final time"));
  last(evo->add_option("--scheme", e.scheme, "imex | explicit"));
  last(evo->add_option("--seed", e.seed, "reserved"));
  last(evo->add_option("--out", e.out, "output directory")->required());
  last(evo->add_flag("--expect-subcritical", e.expect_subcritical,
                     "exit 4 if the run flags supercritical growth"));
  last(evo->add_flag("--dump-all-snapshots", e.dump_all_snapshots,
                     "write every snapshot file, not just the sparse tail"));
  last(evo->add_option("--dense-until", e.dense_until, "dense snapshot phase end"));
  last(evo->add_option("--snapshot-every", e.snapshot_every, "steps per snapshot in dense phase"));
  last(evo->add_option("--snapshot-growth", e.snapshot_growth, "geometric snapshot factor"));
  last(evo->add_option("--sup-threshold", e.sup_threshold, "sup u/x flag level"));
  last(evo->add_option("--max-halvings", e.max_halvings, "dt halvings before giving up"));

  // rate
  auto* rate = app.add_subcommand("rate", "fit exponential decay rates on a stored run");
  std::string r_dir, r_which = "both", r_window;
  double r_frac = 0.9, r_floor = 1e-11;
  std::optional<int> r_N;
  std::optional<double> r_m;
  std::size_t r_n = 1024;
  last(rate->add_option("--run-dir", r_dir, "directory holding series.csv")->required());
  last(rate->add_option("--which", r_which, "L | C1 | both"));
  last(rate->add_option("--window", r_window, "fit window lo:hi (default automatic)"));
  last(rate->add_option("--lambda-frac", r_frac, "fraction of the spectral gap to compare against"));
  last(rate->add_option("--N", r_N, "dimension override (default: manifest)"));
  last(rate->add_option("--m", r_m, "mass override (default: manifest)"));
  last(rate->add_option("--n", r_n, "grid cells for the comparator solve"));
  last(rate->add_option("--floor", r_floor, "discard norm samples at or below this"));

  // sweep
  auto* sweep = app.add_subcommand("sweep", "lambda1 over a dilation grid with a worker pool");
  int w_N = 3;
  std::string w_agrid, w_out;
  std::size_t w_n = 1024;
  double w_grading = 1.0;
  unsigned w_jobs = 0;
  last(sweep->add_option("--N", w_N, "spatial dimension")->required());
  last(sweep->add_option("--a-grid", w_agrid, "lo:hi:step (fractions of A when A is finite)")->required());
  last(sweep->add_option("--n", w_n, "grid cells"));
  last(sweep->add_option("--grading", w_grading, "mesh grading exponent >= 1"));
  last(sweep->add_option("--jobs", w_jobs, "worker threads (0 = hardware)"));
  last(sweep->add_option("--out", w_out, "output directory")->required());

  // validate
  app.add_subcommand("validate", "run the quick invariant suite");

  for (auto* sc : app.get_subcommands({}))
    sc->add_option("--config", "flat key=value file applied before other flags (expanded early)")
        ->type_name("FILE");

  try {
    std::vector<char*> cargs;
    std::string prog = "kslab";
    cargs.push_back(prog.data());
    for (auto& s : args) cargs.push_back(s.data());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& pe) {
    app.exit(pe);
    return 2;
  }

  try {
    if (steady->parsed()) return cmd_steady(s_N, s_tol, s_out);
    if (lam->parsed()) return cmd_lambda1(l_N, l_m, l_a, l_agrid, l_n, l_grading, l_tol, l_out);
    if (evo->parsed()) return cmd_evolve(e);
    if (rate->parsed()) return cmd_rate(r_dir, r_which, r_window, r_frac, r_N, r_m, r_n, r_floor);
    if (sweep->parsed()) return cmd_sweep(w_N, w_agrid, w_n, w_grading, w_jobs, w_out);
    return cmd_validate();
  } catch (const ConfigError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return 2;
  } catch (const SupercriticalError& ex) {
    std::fprintf(stderr, "supercritical: %s\n", ex.what());
    return 3;
  } catch (const Error& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 3;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 3;
  }
}
