// Acceptance gate: thirteen numbered checks, one line each, nonzero exit on
// any hard failure. Tolerances and run configurations are pinned here.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "kslab/errors.hpp"
#include "kslab/evolution.hpp"
#include "kslab/functionals.hpp"
#include "kslab/norms.hpp"
#include "kslab/profiles.hpp"
#include "kslab/rate.hpp"
#include "kslab/spectrum.hpp"

using namespace kslab;

namespace {

int failures = 0;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

struct Timer {
  double start = now_seconds();
  double elapsed() const { return now_seconds() - start; }
};

void report(int id, bool pass, const std::string& detail, double secs, double budget) {
  bool on_time = budget <= 0.0 || secs < budget;
  bool ok = pass && on_time;
  if (!ok) ++failures;
  std::printf("criterion %2d %s  %s (%.1f s%s)\n", id, ok ? "pass" : "FAIL",
              detail.c_str(), secs, on_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const SteadyProfile& profile(int N) {
  static SteadyProfile p2 = build_profile(2, 1e-10);
  static SteadyProfile p3 = build_profile(3, 1e-10);
  static SteadyProfile p4 = build_profile(4, 1e-10);
  if (N == 2) return p2;
  if (N == 3) return p3;
  return p4;
}

// Random smooth test modes shared by the identity checks: low trigonometric
// sums vanishing at both ends.
struct TrigMode {
  std::vector<double> c;
  double operator()(double x) const {
    double s = 0.0;
    for (std::size_t k = 1; k <= c.size(); ++k)
      s += c[k - 1] * std::sin(k * M_PI * x) / (k * M_PI);
    return s;
  }
};

std::vector<TrigMode> trig_modes(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TrigMode> modes(count);
  for (auto& m : modes) {
    m.c.resize(5);
    for (auto& ck : m.c) ck = u(rng);
  }
  return modes;
}

GridFn sample_zero_ends(GridPtr g, const TrigMode& m) {
  GridFn h = GridFn::sample(g, [&](double x) { return m(x); });
  h.values.front() = 0.0;
  h.values.back() = 0.0;
  return h;
}

// Stashed state shared between the rate runs and the monitors of 10 and 12.
struct RateRun {
  Trajectory traj;
  NormSeries series;
  RateFit fitL, fitC1;
  double a = 0.0;
};

bool lyapunov_nonincreasing(const Trajectory& tr, double* worst_jump) {
  const bool n2 = tr.params.N == 2;
  double prev = n2 ? G_energy(tr.snapshots.front()) : F_energy(tr.snapshots.front(), tr.params);
  *worst_jump = 0.0;
  bool ok = true;
  for (std::size_t k = 1; k < tr.snapshots.size(); ++k) {
    double cur = n2 ? G_energy(tr.snapshots[k]) : F_energy(tr.snapshots[k], tr.params);
    double jump = cur - prev;
    *worst_jump = std::max(*worst_jump, jump);
    if (jump > 1e-8 * (1.0 + std::abs(prev))) ok = false;
    prev = cur;
  }
  return ok;
}

}  // namespace

int main() {
  std::printf("acceptance checks\n");

  // 1: the dimension-two profile has closed forms to compare against
  try {
    Timer t;
    const SteadyProfile& p = profile(2);
    double worst = 0.0;
    for (int i = 1; i <= 10000; ++i) {
      double x = i / 10000.0;
      worst = std::max(worst, std::abs(eval_U1(p, x) - x / (1.0 + x / 2.0)));
    }
    bool ok = worst <= 1e-8 && std::abs(p.M - 2.0) <= 1e-10;
    double worst_a = 0.0;
    for (double m : {0.5, 1.0, 1.5})
      worst_a = std::max(worst_a, std::abs(solve_a_of_m(p, m) - m / (1.0 - m / 2.0)));
    ok = ok && worst_a <= 1e-8;
    report(1, ok,
           fmt("profile error %.2e, |M-2| %.2e, mass-map error %.2e", worst,
               std::abs(p.M - 2.0), worst_a),
           t.elapsed(), 1.0);
  } catch (const std::exception& e) {
    report(1, false, e.what(), 0.0, 0.0);
  }

  // 2: the synthetic pencil with unit stiffness weight approaches 1/4
  try {
    Timer t;
    auto g = Grid::make(4096, 8.0);
    EigenPair e = smallest_eigenpair(assemble_classic_hardy(g));
    double err = std::abs(e.lambda - 0.25);
    report(2, err <= 5e-3, fmt("|lambda1 - 1/4| = %.2e at n=4096", err), t.elapsed(), 10.0);
  } catch (const std::exception& e) {
    report(2, false, e.what(), 0.0, 0.0);
  }

  // 3: spectral constant above 1 by more than the refinement gap, with a
  // stable distance to the second eigenvalue
  try {
    Timer t;
    bool ok = true;
    double min_margin = 1e9, min_gap = 1e9;
    for (int N : {2, 3, 4}) {
      const SteadyProfile& p = profile(N);
      double a_eff = solve_a_of_m(p, 0.9 * p.M);
      for (double f : {0.25, 0.5, 0.75, 0.9}) {
        SpectralResult r1 = solve_lambda1(Grid::make(512, 2.0), f * a_eff, p);
        SpectralResult r2 = solve_lambda1(Grid::make(1024, 2.0), f * a_eff, p);
        min_margin = std::min(min_margin, r1.lambda1 - 1.0 - r1.refinement_gap);
        min_gap = std::min(min_gap, std::min(r1.lambda2 - r1.lambda1, r2.lambda2 - r2.lambda1));
        ok = ok && r1.lambda1 > 1.0 + r1.refinement_gap && r1.lambda2 > r1.lambda1 &&
             r2.lambda2 > r2.lambda1;
      }
    }
    report(3, ok, fmt("min margin over 1: %.2e, min lambda2-lambda1: %.2e", min_margin, min_gap),
           t.elapsed(), 60.0);
  } catch (const std::exception& e) {
    report(3, false, e.what(), 0.0, 0.0);
  }

  // 4 and 5: identity residuals on twenty random smooth modes
  try {
    Timer t;
    auto modes = trig_modes(20, 20240817);
    struct Pair {
      int N;
      double a;
    };
    std::vector<Pair> cases{{2, solve_a_of_m(profile(2), 1.0)},
                            {3, solve_a_of_m(profile(3), 0.5 * profile(3).M)}};
    auto g_half = Grid::make(2048, 2.0);
    auto g_full = Grid::make(4096, 2.0);
    double worst4 = 0.0, worst5 = 0.0;
    bool ok4 = true, halving = true;
    for (const auto& cs : cases) {
      const SteadyProfile& p = profile(cs.N);
      for (const auto& m : modes) {
        double res_h = beesack_residual(sample_zero_ends(g_half, m), cs.a, p);
        double res_f = beesack_residual(sample_zero_ends(g_full, m), cs.a, p);
        worst4 = std::max(worst4, res_f);
        ok4 = ok4 && res_f <= 1e-5;
        // the residual parks at the quadrature floor well before 1e-5, so
        // halving is only required while above that floor
        halving = halving && (res_f <= 1e-8 || res_f <= 0.55 * res_h);
      }
    }
    report(4, ok4 && halving, fmt("max residual %.2e at n=4096, refinement ok=%d", worst4,
                                  halving ? 1 : 0),
           t.elapsed(), 30.0);

    Timer t5;
    bool ok5 = true;
    for (const auto& cs : cases) {
      const SteadyProfile& p = profile(cs.N);
      for (const auto& m : modes) {
        double res = lemma41_residual(sample_zero_ends(g_full, m), cs.a, p);
        worst5 = std::max(worst5, res);
        ok5 = ok5 && res <= 1e-5;
      }
    }
    report(5, ok5, fmt("max residual %.2e at n=4096", worst5), t5.elapsed(), 30.0);
  } catch (const std::exception& e) {
    report(4, false, e.what(), 0.0, 0.0);
    report(5, false, e.what(), 0.0, 0.0);
  }

  // 6: steady data drifts below 1e-6 over unit time
  try {
    Timer t;
    double worst = 0.0;
    bool ok = true;
    for (int N : {2, 3}) {
      const SteadyProfile& p = profile(N);
      double m = 0.5 * p.M;
      double a = solve_a_of_m(p, m);
      // dimension three needs boundary grading: the profile curvature
      // concentrates at x = 1 where dU vanishes
      auto g = Grid::make(2048, N == 2 ? 1.0 : 3.0);
      GridFn u0 = GridFn::sample(g, [&](double x) { return eval_U(p, a, x); });
      EvolveConfig cfg;
      cfg.dt = 1e-4;
      cfg.t_end = 1.0;
      Trajectory tr = run(u0, ModelParams{N, m}, cfg);
      double drift = 0.0;
      for (std::size_t i = 0; i < u0.size(); ++i)
        drift = std::max(drift, std::abs(tr.snapshots.back()[i] - u0[i]));
      worst = std::max(worst, drift);
      ok = ok && drift <= 1e-6;
    }
    report(6, ok, fmt("max drift %.2e (n=2048, dt=1e-4, t=1)", worst), t.elapsed(), 60.0);
  } catch (const std::exception& e) {
    report(6, false, e.what(), 0.0, 0.0);
  }

  // 7 and 8: fitted decay rates beat the guaranteed fraction of the spectral
  // gap, and both norms decay at one rate
  RateRun run7, run8;
  auto rate_criterion = [&](int id, int N, double m, double grading,
                            std::pair<double, double> window, double budget,
                            RateRun* out) {
    try {
      Timer t;
      const SteadyProfile& p = profile(N);
      double a = solve_a_of_m(p, m);
      auto g = Grid::make(2048, grading);
      EvolveConfig cfg;
      cfg.dt = 1e-4;
      cfg.t_end = 30.0;
      cfg.dense_until = 1.6;  // then sparse geometric sampling keeps the fit
      cfg.snapshot_growth = 1.1;  // honest about the residual bow
      Trajectory tr = run(GridFn::sample(g, [&](double x) { return m * x; }),
                          ModelParams{N, m}, cfg);
      NormSeries series = norm_series_from(tr, p, a);
      RateFit fL = fit_rate(series, WhichNorm::L, window);
      RateFit fC = fit_rate(series, WhichNorm::C1, window);
      SpectralResult sr = solve_lambda1(Grid::make(1024, 2.0), a, p);
      double guaranteed = theoretical_rate(a, 0.9, sr, p);
      ConsistencyReport cons = rate_consistency(fL, fC);
      bool ok = fL.slope >= guaranteed - fL.slope_stderr && cons.pass &&
                fL.r_squared >= 0.999 && fC.r_squared >= 0.999;
      report(id, ok,
             fmt("slope_L %.4f vs guaranteed %.4f, slope_C1 %.4f (band %.4f), r2 %.6f/%.6f",
                 fL.slope, guaranteed, fC.slope, cons.tolerance, fL.r_squared, fC.r_squared),
             t.elapsed(), budget);
      out->traj = std::move(tr);
      out->series = std::move(series);
      out->fitL = fL;
      out->fitC1 = fC;
      out->a = a;
    } catch (const std::exception& e) {
      report(id, false, e.what(), 0.0, 0.0);
    }
  };
  rate_criterion(7, 2, 1.0, 1.0, {2.0, 9.0}, 300.0, &run7);
  rate_criterion(8, 3, 0.5 * profile(3).M, 3.0, {2.0, 7.5}, 600.0, &run8);

  // 9: ordered initial data stays ordered
  std::vector<Trajectory> comparison_runs;
  try {
    Timer t;
    auto g = Grid::make(512);
    ModelParams mp{2, 1.0};
    EvolveConfig cfg;
    cfg.dt = 2e-4;
    cfg.t_end = 5.0;
    std::mt19937 rng(424242);
    double worst = 0.0;
    for (int pair = 0; pair < 10; ++pair) {
      GridFn f1(g), f2(g);
      {
        // random admissible draws: x plus damped low trigonometric modes
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<double> c1(5), c2(5);
        double s1 = 0.0, s2 = 0.0;
        for (int k = 0; k < 5; ++k) {
          c1[k] = u(rng);
          c2[k] = u(rng);
          s1 += std::abs(c1[k]);
          s2 += std::abs(c2[k]);
        }
        for (int k = 0; k < 5; ++k) {
          c1[k] *= 0.8 / s1;
          c2[k] *= 0.8 / s2;
        }
        for (std::size_t i = 0; i < f1.size(); ++i) {
          double x = g->nodes[i];
          double a1 = x, a2 = x;
          for (int k = 1; k <= 5; ++k) {
            a1 += c1[k - 1] * std::sin(k * M_PI * x) / (k * M_PI);
            a2 += c2[k - 1] * std::sin(k * M_PI * x) / (k * M_PI);
          }
          f1[i] = a1;
          f2[i] = a2;
        }
        f1.values.front() = f2.values.front() = 0.0;
        f1.values.back() = f2.values.back() = 1.0;
      }
      GridFn lo(g), hi(g);
      for (std::size_t i = 0; i < f1.size(); ++i) {
        lo[i] = std::min(f1[i], f2[i]);
        hi[i] = std::max(f1[i], f2[i]);
      }
      Trajectory tlo = run(lo, mp, cfg);
      Trajectory thi = run(hi, mp, cfg);
      for (std::size_t k = 0; k < tlo.times.size(); ++k)
        for (std::size_t i = 0; i < lo.size(); ++i)
          worst = std::min(worst, thi.snapshots[k][i] - tlo.snapshots[k][i]);
      comparison_runs.push_back(std::move(tlo));
      comparison_runs.push_back(std::move(thi));
    }
    report(9, worst >= -1e-8, fmt("worst ordering defect %.2e over 10 pairs, t <= 5", -worst),
           t.elapsed(), 300.0);
  } catch (const std::exception& e) {
    report(9, false, e.what(), 0.0, 0.0);
  }

  // 10: energies nonincreasing along every stored run; dissipation residual
  // first order in dt
  try {
    Timer t;
    bool ok = true;
    double worst_jump = 0.0, jump = 0.0;
    if (!run7.traj.times.empty()) {
      ok = ok && lyapunov_nonincreasing(run7.traj, &jump);
      worst_jump = std::max(worst_jump, jump);
    } else {
      ok = false;
    }
    if (!run8.traj.times.empty()) {
      ok = ok && lyapunov_nonincreasing(run8.traj, &jump);
      worst_jump = std::max(worst_jump, jump);
    } else {
      ok = false;
    }
    for (const Trajectory& tr : comparison_runs) {
      ok = ok && lyapunov_nonincreasing(tr, &jump);
      worst_jump = std::max(worst_jump, jump);
    }

    // first order in dt: successive residual differences halve once the
    // spatial floor is subtracted out
    auto g = Grid::make(2048);
    PdeState s =
        validate_initial(GridFn::sample(g, [](double x) { return x; }), ModelParams{2, 1.0});
    for (int k = 0; k < 500; ++k) s = step_x(s, 1e-4);
    std::vector<double> res;
    for (double dt : {8e-3, 4e-3, 2e-3}) {
      PdeState n = step_x(s, dt);
      res.push_back(dissipation_residual_G(s.u, n.u, dt));
    }
    double ratio = (res[0] - res[1]) / (res[1] - res[2]);
    bool first_order = res[2] < res[1] && res[1] < res[0] && ratio > 1.4 && ratio < 2.8;
    report(10, ok && first_order,
           fmt("worst energy jump %.2e over %zu runs, dt-halving ratio %.2f", worst_jump,
               comparison_runs.size() + 2, ratio),
           t.elapsed(), 0.0);
  } catch (const std::exception& e) {
    report(10, false, e.what(), 0.0, 0.0);
  }

  // 11: the two discretizations agree through the coordinate identification
  try {
    Timer t;
    double worst = 0.0;
    for (int N : {2, 3}) {
      const SteadyProfile& p = profile(N);
      double m = (N == 2) ? 1.0 : 0.5 * p.M;
      ModelParams mp{N, m};
      auto gx = Grid::make(2048);
      auto gr = Grid::make(2048);
      EvolveConfig cx;
      cx.dt = 1e-4;
      cx.t_end = 5.0;
      Trajectory tx = run(GridFn::sample(gx, [&](double x) { return m * x; }), mp, cx);

      PdeState s0{mp, 0.0, GridFn::sample(gx, [&](double x) { return m * x; })};
      RadialState w0 = map_u_to_w(s0, gr);
      EvolveConfig cw;
      cw.dt = cx.dt / (N * N);
      cw.t_end = cx.t_end / (N * N);
      RadialTrajectory tw = run_radial(w0.w, mp, cw);
      PdeState back = map_w_to_u(RadialState{mp, tw.times.back(), tw.snapshots.back()}, gx);
      for (std::size_t i = 0; i < back.u.size(); ++i)
        worst = std::max(worst, std::abs(back.u[i] - tx.snapshots.back()[i]));
    }
    report(11, worst <= 5e-4, fmt("max cross-solver difference %.2e at t=5, n=2048", worst),
           t.elapsed(), 300.0);
  } catch (const std::exception& e) {
    report(11, false, e.what(), 0.0, 0.0);
  }

  // 12: smoothing ratio bounded on the dense window of the rate run
  try {
    Timer t;
    if (run7.traj.times.empty()) throw NumericalError("rate run unavailable");
    SmoothingSeries sm = smoothing_check(run7.traj, 1.0, profile(2), run7.a);
    double max_ratio = 0.0;
    std::size_t counted = 0;
    for (const auto& pt : sm.points) {
      if (pt.t < 10.0 * 1e-4 - 1e-12 || pt.t > 0.5 + 1e-12) continue;
      max_ratio = std::max(max_ratio, pt.ratio);
      ++counted;
    }
    // regression baseline: observed 0.76 on this configuration
    bool ok = counted >= 100 && max_ratio <= 2.0;
    report(12, ok, fmt("max ratio %.4f over %zu samples, beta %.2f", max_ratio, counted, sm.beta),
           t.elapsed(), 0.0);
  } catch (const std::exception& e) {
    report(12, false, e.what(), 0.0, 0.0);
  }

  // 13: the spectral constant trends toward 1 at the edge of the family;
  // a broken trend is reported as a warning only
  try {
    Timer t;
    const SteadyProfile& p = profile(3);
    std::vector<double> lambdas;
    bool decreasing = true;
    for (double f = 0.25; f <= 0.951; f += 0.1) {
      SpectralResult r = solve_lambda1(Grid::make(4096, 2.0), f * p.A, p);
      if (!lambdas.empty() && r.lambda1 >= lambdas.back()) decreasing = false;
      lambdas.push_back(r.lambda1);
    }
    bool trend = decreasing && lambdas.back() < 1.1;
    if (!trend)
      std::printf("criterion 13 warning: trend check failed (last lambda1 %.6f)\n",
                  lambdas.back());
    report(13, true,
           fmt("%s, lambda1 %.4f -> %.6f over 8 samples%s", decreasing ? "decreasing" : "NOT decreasing",
               lambdas.front(), lambdas.back(), trend ? "" : " [warning]"),
           t.elapsed(), 120.0);
  } catch (const std::exception& e) {
    report(13, false, e.what(), 0.0, 0.0);
  }

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
