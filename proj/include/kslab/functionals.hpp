#pragma once

#include <vector>

#include "kslab/evolution.hpp"
#include "kslab/grid.hpp"
#include "kslab/model.hpp"

namespace kslab {

// Lyapunov functional for N >= 3 (q < 1):
//   F[u] = int udot^{2-q} / ((2-q)(1-q)) - u^2 / (2 x^{2-q}).
// Cell slopes clamped at 0 feed the first term; the weighted term uses the
// exact power-weight cell integrals. N = 2 is rejected (the 1/(1-q) factor
// degenerates); use G_energy there.
double F_energy(const GridFn& u, const ModelParams& params);

// Lyapunov functional for N = 2:
//   G[u] = int u_x (ln u_x - 1) - u^2 / (2x).
// Every cell slope must exceed slope_floor; violations name the first bad cell.
inline constexpr double kSlopeFloor = 1e-14;
double G_energy(const GridFn& u);

// Formal Riemannian metric  g_u(h,k) = int h k / (x^{2-q} udot^q)  with udot
// the (positive) cell slopes of u; exact power-weight integrals per cell with
// the slope factor constant on each cell. Requires h(0) = k(0) = 0.
double metric_g(const GridFn& u, const GridFn& h, const GridFn& k,
                const ModelParams& params);

// Dissipation identity monitor for N = 2: per consecutive snapshot interval,
//   | dG/dt + int u_t^2 / (x u_x) |
// with u_t the realized increment over the interval and u_x from the midpoint
// profile. Expected O(dt) + O(n^{-1}) along genuine trajectories.
std::vector<double> dissipation_residual_G(const Trajectory& traj);

// Single-interval version.
double dissipation_residual_G(const GridFn& u0, const GridFn& u1, double dt);

}  // namespace kslab
