#include "kslab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "kslab/errors.hpp"
#include "kslab/norms.hpp"

namespace kslab {

double F_energy(const GridFn& u, const ModelParams& params) {
  params.validate();
  const double q = params.q();
  if (params.N == 2)
    throw WrongFunctionalError("F_energy is undefined at q = 1; use G_energy for N = 2");
  if (u.values.front() != 0.0)
    throw DivergentWeightError("F_energy: u(0) must vanish for the weighted term");

  double gradient_term = 0.0;
  for (std::size_t c = 0; c < u.grid->cells(); ++c) {
    const double s = std::max(u.cell_slope(c), 0.0);
    gradient_term += std::pow(s, 2.0 - q) * u.grid->dx(c);
  }
  gradient_term /= (2.0 - q) * (1.0 - q);
  return gradient_term - 0.5 * weighted_l2_sq(u, q - 2.0);
}

double G_energy(const GridFn& u) {
  if (u.values.front() != 0.0)
    throw DivergentWeightError("G_energy: u(0) must vanish for the weighted term");
  double entropy_term = 0.0;
  for (std::size_t c = 0; c < u.grid->cells(); ++c) {
    const double s = u.cell_slope(c);
    if (s <= kSlopeFloor)
      throw NonpositiveSlopeError("G_energy: cell slope at or below the floor", c);
    entropy_term += s * (std::log(s) - 1.0) * u.grid->dx(c);
  }
  return entropy_term - 0.5 * weighted_l2_sq(u, -1.0);
}

double metric_g(const GridFn& u, const GridFn& h, const GridFn& k,
                const ModelParams& params) {
  params.validate();
  const double q = params.q();
  if (h.values.front() != 0.0 || k.values.front() != 0.0)
    throw DivergentWeightError("metric_g: h(0) and k(0) must vanish");

  const auto& x = u.grid->nodes;
  double total = 0.0;
  for (std::size_t c = 0; c < u.grid->cells(); ++c) {
    const double s = u.cell_slope(c);
    if (s <= kSlopeFloor)
      throw NonpositiveSlopeError("metric_g: cell slope at or below the floor", c);
    const double lo = x[c], hi = x[c + 1];
    // P1 pieces of h and k as c0 + c1 x on the cell
    const double hc1 = h.cell_slope(c), hc0 = h.values[c] - hc1 * lo;
    const double kc1 = k.cell_slope(c), kc0 = k.values[c] - kc1 * lo;
    total += std::pow(s, -q) *
             weighted_affine_product(q - 2.0, lo, hi, hc0, hc1, kc0, kc1);
  }
  return total;
}

double dissipation_residual_G(const GridFn& u0, const GridFn& u1, double dt) {
  if (!(dt > 0.0)) throw DomainError("dissipation_residual_G: dt must be positive");
  const double dG = (G_energy(u1) - G_energy(u0)) / dt;

  // int u_t^2 / (x u_x): u_t nodal from the realized increment (vanishes at
  // both ends), u_x from midpoint-profile cell slopes; exact x^{-1} cell
  // integrals of the P1 interpolant of u_t
  const auto& x = u0.grid->nodes;
  double diss = 0.0;
  for (std::size_t c = 0; c < u0.grid->cells(); ++c) {
    const double s = 0.5 * (u0.cell_slope(c) + u1.cell_slope(c));
    if (s <= kSlopeFloor)
      throw NonpositiveSlopeError("dissipation_residual_G: flat midpoint cell", c);
    const double lo = x[c], hi = x[c + 1];
    const double tl = (u1.values[c] - u0.values[c]) / dt;
    const double tr = (u1.values[c + 1] - u0.values[c + 1]) / dt;
    const double c1 = (tr - tl) / (hi - lo);
    const double c0 = tl - c1 * lo;
    diss += weighted_affine_product(-1.0, lo, hi, c0, c1, c0, c1) / s;
  }
  return std::abs(dG + diss);
}

std::vector<double> dissipation_residual_G(const Trajectory& traj) {
  if (traj.params.N != 2)
    throw WrongFunctionalError("dissipation_residual_G monitors the N = 2 functional");
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < traj.snapshots.size(); ++k) {
    const double dt = traj.times[k + 1] - traj.times[k];
    out.push_back(dissipation_residual_G(traj.snapshots[k], traj.snapshots[k + 1], dt));
  }
  return out;
}

}  // namespace kslab
