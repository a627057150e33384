#include "kslab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "kslab/errors.hpp"
#include "kslab/norms.hpp"
#include "kslab/numerics.hpp"

namespace kslab {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double min_cell_slope(const GridFn& u) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < u.grid->cells(); ++c) m = std::min(m, u.cell_slope(c));
  return m;
}

// centered interior slope on a nonuniform grid
double centered_slope(const GridFn& u, std::size_t i) {
  const auto& x = u.grid->nodes;
  const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
  return (-hr / hl * u.values[i - 1] + (hr / hl - hl / hr) * u.values[i] +
          hl / hr * u.values[i + 1]) /
         (hl + hr);
}

void check_finite(const GridFn& u, double t, double amp_bound) {
  double lo = u.values[0], hi = u.values[0];
  bool finite = true;
  for (double v : u.values) {
    if (!std::isfinite(v)) finite = false;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!finite || hi > amp_bound || lo < -amp_bound)
    throw InstabilityError("time step produced unstable values", t, lo, hi);
}

// nodal slopes for cubic reconstruction: 5-point Fornberg stencils (clamped
// at the ends), 4th order on smooth data
std::vector<double> high_order_slopes(const GridFn& u) {
  const auto& x = u.grid->nodes;
  const std::size_t n = u.size();
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i < 2 ? 0 : std::min(i - 2, n - 5);
    std::vector<double> xs(x.begin() + lo, x.begin() + lo + 5);
    const auto w = fd_weights(x[i], xs, 1);
    double s = 0.0;
    for (std::size_t k = 0; k < 5; ++k) s += w[k] * u.values[lo + k];
    m[i] = s;
  }
  return m;
}

}  // namespace

void EvolveConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("EvolveConfig: dt must be positive");
  if (!(t_end > 0.0)) throw ConfigError("EvolveConfig: t_end must be positive");
  if (snapshot_every < 1) throw ConfigError("EvolveConfig: snapshot_every < 1");
  if (!(snapshot_growth > 1.0)) throw ConfigError("EvolveConfig: snapshot growth <= 1");
  if (max_halvings < 0) throw ConfigError("EvolveConfig: negative max_halvings");
}

PdeState validate_initial(const GridFn& u0, const ModelParams& params) {
  params.validate();
  if (u0.values.front() != 0.0)
    throw YmError("initial datum violates u(0) = 0", "left-boundary");
  if (u0.values.back() != params.m)
    throw YmError("initial datum violates u(1) = m", "right-boundary");
  for (std::size_t c = 0; c < u0.grid->cells(); ++c)
    if (u0.cell_slope(c) < -1e-12)
      throw YmError("initial datum is decreasing on a cell", "monotonicity");
  return PdeState{params, 0.0, u0};
}

PdeState step_x(const PdeState& s, double dt, EvolveConfig::Scheme scheme) {
  const double q = s.params.q();
  const double m = s.params.m;
  const auto& x = s.u.grid->nodes;
  const std::size_t n = s.u.grid->cells();

  // explicit nonlinearity at interior nodes
  std::vector<double> nl(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double ux = std::max(centered_slope(s.u, i), 0.0);
    nl[i] = s.u.values[i] * std::pow(ux, q);
  }

  PdeState out{s.params, s.t + dt, GridFn(s.u.grid)};

  if (scheme == EvolveConfig::Scheme::explicit_euler) {
    out.u.values[0] = 0.0;
    out.u.values[n] = m;
    for (std::size_t i = 1; i < n; ++i) {
      const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
      const double d2 = 2.0 * (s.u.values[i - 1] / (hl * (hl + hr)) -
                               s.u.values[i] / (hl * hr) +
                               s.u.values[i + 1] / (hr * (hl + hr)));
      out.u.values[i] =
          s.u.values[i] + dt * (std::pow(x[i], 2.0 - q) * d2 + nl[i]);
    }
    check_finite(out.u, out.t, 2.0 * m + 10.0);
    return out;
  }

  // IMEX: (I - dt x^{2-q} D2) u_new = u + dt nl, boundary rows pinned
  std::vector<double> lower(n), diag(n + 1), upper(n), rhs(n + 1);
  diag[0] = 1.0;
  upper[0] = 0.0;
  rhs[0] = 0.0;
  diag[n] = 1.0;
  lower[n - 1] = 0.0;
  rhs[n] = m;
  for (std::size_t i = 1; i < n; ++i) {
    const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
    const double c = dt * std::pow(x[i], 2.0 - q);
    lower[i - 1] = -c * 2.0 / (hl * (hl + hr));
    diag[i] = 1.0 + c * 2.0 / (hl * hr);
    upper[i] = -c * 2.0 / (hr * (hl + hr));
    rhs[i] = s.u.values[i] + dt * nl[i];
  }
  out.u.values = solve_tridiagonal(lower, diag, upper, std::move(rhs));
  check_finite(out.u, out.t, 2.0 * m + 10.0);
  return out;
}

RadialState step_w(const RadialState& s, double dt, EvolveConfig::Scheme scheme) {
  const int N = s.params.N;
  const double q = s.params.q();
  const double m = s.params.m;
  const auto& r = s.w.grid->nodes;
  const std::size_t n = s.w.grid->cells();
  const double d = N + 2;  // ambient dimension of the ball

  // explicit reaction N^2 w (w + r w_r / N)^q, slope base clamped at 0
  std::vector<double> nl(n + 1, 0.0);
  nl[0] = double(N) * N * s.w.values[0] * std::pow(std::max(s.w.values[0], 0.0), q);
  for (std::size_t i = 1; i < n; ++i) {
    const double wr = centered_slope(s.w, i);
    const double base = std::max(s.w.values[i] + r[i] * wr / N, 0.0);
    nl[i] = double(N) * N * s.w.values[i] * std::pow(base, q);
  }

  // diffusion rows: finite-volume (r^{d-1} w_r)_r / r^{d-1}; origin row is
  // the symmetry limit d * w_rr(0)
  const double amp = 1e6;
  RadialState out{s.params, s.t + dt, GridFn(s.w.grid)};
  std::vector<double> lower(n), diag(n + 1), upper(n), rhs(n + 1);

  const double h0 = r[1] - r[0];
  const double c0 = d * 2.0 / (h0 * h0);
  diag[n] = 1.0;
  lower[n - 1] = 0.0;
  rhs[n] = m;

  if (scheme == EvolveConfig::Scheme::explicit_euler) {
    out.w.values[n] = m;
    out.w.values[0] =
        s.w.values[0] + dt * (c0 * (s.w.values[1] - s.w.values[0]) + nl[0]);
    for (std::size_t i = 1; i < n; ++i) {
      const double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
      const double rp = std::pow(0.5 * (r[i] + r[i + 1]), d - 1.0);
      const double rm = std::pow(0.5 * (r[i - 1] + r[i]), d - 1.0);
      const double scale = std::pow(r[i], d - 1.0) * 0.5 * (hl + hr);
      const double diff = (rp * (s.w.values[i + 1] - s.w.values[i]) / hr -
                           rm * (s.w.values[i] - s.w.values[i - 1]) / hl) /
                          scale;
      out.w.values[i] = s.w.values[i] + dt * (diff + nl[i]);
    }
    check_finite(out.w, out.t, amp);
    return out;
  }

  diag[0] = 1.0 + dt * c0;
  upper[0] = -dt * c0;
  rhs[0] = s.w.values[0] + dt * nl[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
    const double rp = std::pow(0.5 * (r[i] + r[i + 1]), d - 1.0);
    const double rm = std::pow(0.5 * (r[i - 1] + r[i]), d - 1.0);
    const double scale = std::pow(r[i], d - 1.0) * 0.5 * (hl + hr);
    lower[i - 1] = -dt * rm / (hl * scale);
    diag[i] = 1.0 + dt * (rm / hl + rp / hr) / scale;
    upper[i] = -dt * rp / (hr * scale);
    rhs[i] = s.w.values[i] + dt * nl[i];
  }
  out.w.values = solve_tridiagonal(lower, diag, upper, std::move(rhs));
  check_finite(out.w, out.t, amp);
  return out;
}

RadialState map_u_to_w(const PdeState& s, GridPtr r_grid) {
  const int N = s.params.N;
  const std::vector<double> slopes = high_order_slopes(s.u);
  const double slope0 = slopes[0];
  HermiteSpline u_interp(s.u.grid->nodes, s.u.values, slopes, true);

  RadialState out{s.params, s.t / (double(N) * N), GridFn(std::move(r_grid))};
  const auto& r = out.w.grid->nodes;
  for (std::size_t j = 0; j < out.w.size(); ++j) {
    const double xx = std::pow(r[j], double(N));
    out.w.values[j] = xx == 0.0 ? slope0 : u_interp.value(xx) / xx;
  }
  out.w.values.back() = s.params.m;
  return out;
}

PdeState map_w_to_u(const RadialState& s, GridPtr x_grid) {
  const int N = s.params.N;
  HermiteSpline w_interp(s.w.grid->nodes, s.w.values, high_order_slopes(s.w), false);

  PdeState out{s.params, s.t * double(N) * N, GridFn(std::move(x_grid))};
  const auto& x = out.u.grid->nodes;
  for (std::size_t i = 0; i < out.u.size(); ++i)
    out.u.values[i] = x[i] == 0.0 ? 0.0 : x[i] * w_interp.value(std::pow(x[i], 1.0 / N));
  out.u.values.back() = s.params.m;
  return out;
}

namespace {

// Shared snapshot-schedule driver for both problems.
template <typename State, typename Stepper, typename OnSnapshot>
void drive(State& cur, const EvolveConfig& cfg, const Stepper& do_step,
           const OnSnapshot& on_snapshot, double& dt_used, int& restarts) {
  double dt = cfg.dt;
  State last_snap = cur;
  if (!on_snapshot(cur)) return;  // t = 0 can already trip the stop rule

  long step_in_phase = 0;
  double next_geom = 0.0;
  while (cur.t < cfg.t_end - 1e-12 * cfg.t_end) {
    try {
      State next = do_step(cur, std::min(dt, cfg.t_end - cur.t));
      cur = std::move(next);
      ++step_in_phase;
    } catch (const InstabilityError& e) {
      if (restarts >= cfg.max_halvings)
        throw InstabilityError("instability persisted through dt halvings; last stable t = " +
                                   std::to_string(last_snap.t),
                               e.t, e.umin, e.umax);
      ++restarts;
      dt *= 0.5;
      cur = last_snap;
      step_in_phase = 0;
      continue;
    }

    bool snap = false;
    if (cur.t < cfg.dense_until) {
      snap = step_in_phase % cfg.snapshot_every == 0;
    } else {
      if (next_geom == 0.0) next_geom = cur.t;  // entering the sparse phase
      if (cur.t >= next_geom) {
        snap = true;
        next_geom = std::max(cur.t * cfg.snapshot_growth, cur.t + dt);
      }
    }
    if (cur.t >= cfg.t_end - 1e-12 * cfg.t_end) snap = true;

    if (snap) {
      last_snap = cur;
      if (!on_snapshot(cur)) break;  // supercritical stop
    }
  }
  dt_used = dt;
}

}  // namespace

Trajectory run(const GridFn& u0, const ModelParams& params, const EvolveConfig& cfg,
               const SnapshotHook& hook) {
  cfg.validate();
  PdeState cur = validate_initial(u0, params);

  Trajectory traj;
  traj.grid = u0.grid;
  traj.params = params;

  auto on_snapshot = [&](const PdeState& s) {
    traj.times.push_back(s.t);
    traj.snapshots.push_back(s.u);
    traj.min_slope.push_back(min_cell_slope(s.u));
    traj.sup.push_back(params.m == 0.0 ? 0.0 : sup_ratio(s.u));
    if (hook) hook(s);
    if (traj.sup.back() > cfg.sup_threshold) {
      traj.supercritical = true;
      return false;
    }
    return true;
  };
  auto stepper = [&](const PdeState& s, double dt) { return step_x(s, dt, cfg.scheme); };
  drive(cur, cfg, stepper, on_snapshot, traj.dt_used, traj.restarts);
  return traj;
}

RadialTrajectory run_radial(const GridFn& w0, const ModelParams& params,
                            const EvolveConfig& cfg) {
  cfg.validate();
  if (!all_finite(w0.values)) throw DomainError("run_radial: non-finite initial data");
  RadialState cur{params, 0.0, w0};

  RadialTrajectory traj;
  traj.grid = w0.grid;
  traj.params = params;

  auto on_snapshot = [&](const RadialState& s) {
    traj.times.push_back(s.t);
    traj.snapshots.push_back(s.w);
    return true;
  };
  auto stepper = [&](const RadialState& s, double dt) { return step_w(s, dt, cfg.scheme); };
  drive(cur, cfg, stepper, on_snapshot, traj.dt_used, traj.restarts);
  return traj;
}

}  // namespace kslab
