#pragma once

#include <functional>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/model.hpp"

namespace kslab {

// State of the x-coordinate problem
//   u_t = x^{2-q} u_xx + u (u_x)^q,  u(t,0) = 0, u(t,1) = m.
struct PdeState {
  ModelParams params;
  double t = 0.0;
  GridFn u;
};

// State of the radial cross-check problem in the unit ball of R^{N+2},
//   w_t = w_rr + (N+1)/r w_r + N^2 w (w + r w_r / N)^q,  w(t,1) = m,
// linked to the x-problem by u(t,x) = x w(t/N^2, x^{1/N}).
struct RadialState {
  ModelParams params;
  double t = 0.0;
  GridFn w;
};

struct EvolveConfig {
  double dt = 1e-4;
  double t_end = 1.0;
  enum class Scheme { imex, explicit_euler };
  Scheme scheme = Scheme::imex;
  int snapshot_every = 10;       // steps per snapshot while t < dense_until
  double dense_until = 1.0;      // then snapshot times grow geometrically
  double snapshot_growth = 1.2;
  double mono_tol = 1e-8;        // tolerated transient negative cell slope
  double sup_threshold = 1e3;    // sup u/x beyond this flags supercritical
  int max_halvings = 10;         // dt halvings before giving up

  void validate() const;
};

struct Trajectory {
  GridPtr grid;
  ModelParams params;
  std::vector<double> times;
  std::vector<GridFn> snapshots;
  std::vector<double> min_slope;  // per snapshot
  std::vector<double> sup;        // sup_ratio per snapshot
  bool supercritical = false;     // sup crossed the threshold; run stopped there
  double dt_used = 0.0;           // dt after any stability halvings
  int restarts = 0;
};

// Membership test for the admissible class (u(0)=0, u(1)=m, nondecreasing);
// violations raise YmError naming the clause.
PdeState validate_initial(const GridFn& u0, const ModelParams& params);

// One time step. IMEX: implicit degenerate diffusion (tridiagonal solve with
// pinned boundary rows), explicit nonlinearity u (max(u_x,0))^q with centered
// slopes. Throws InstabilityError on non-finite values.
PdeState step_x(const PdeState& s, double dt,
                EvolveConfig::Scheme scheme = EvolveConfig::Scheme::imex);

// One radial step, same splitting; the origin row uses the symmetry limit of
// the radial Laplacian in dimension N+2.
RadialState step_w(const RadialState& s, double dt,
                   EvolveConfig::Scheme scheme = EvolveConfig::Scheme::imex);

// Coordinate maps between the two problems. Cubic interpolation with
// high-order slope recovery; at x = 0 the removable singularity takes the
// one-sided slope value w(0) = u_x(0). Time is rescaled by 1/N^2.
RadialState map_u_to_w(const PdeState& s, GridPtr r_grid);
PdeState map_w_to_u(const RadialState& s, GridPtr x_grid);

// Drive step_x from t=0 to cfg.t_end with snapshots (dense early, geometric
// later; first and last states always included). On instability the run
// restarts from the last snapshot with dt halved, up to cfg.max_halvings.
// When sup u/x crosses cfg.sup_threshold the run stops and the trajectory is
// flagged supercritical. The hook, when set, sees every snapshot in order.
using SnapshotHook = std::function<void(const PdeState&)>;
Trajectory run(const GridFn& u0, const ModelParams& params, const EvolveConfig& cfg,
               const SnapshotHook& hook = nullptr);

// Same driver for the radial problem (no supercritical rule; callers map
// back to u to diagnose).
struct RadialTrajectory {
  GridPtr grid;
  ModelParams params;
  std::vector<double> times;
  std::vector<GridFn> snapshots;
  double dt_used = 0.0;
  int restarts = 0;
};
RadialTrajectory run_radial(const GridFn& w0, const ModelParams& params,
                            const EvolveConfig& cfg);

}  // namespace kslab
