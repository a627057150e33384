#include "kslab/norms.hpp"

#include <cmath>

namespace kslab {

double power_moment(double p, double a, double b) {
  if (p == -1.0) return std::log(b / a);
  return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
}

double weighted_affine_product(double p, double a, double b, double c0, double c1,
                               double d0, double d1) {
  double s = 0.0;
  if (c0 * d0 != 0.0) s += c0 * d0 * power_moment(p, a, b);
  const double cross = c0 * d1 + c1 * d0;
  if (cross != 0.0) s += cross * power_moment(p + 1, a, b);
  if (c1 * d1 != 0.0) s += c1 * d1 * power_moment(p + 2, a, b);
  return s;
}

double weighted_l2_sq(const GridFn& h, double p) {
  const auto& x = h.grid->nodes;
  double s = 0.0;
  for (std::size_t c = 0; c + 1 < x.size(); ++c) {
    const double slope = h.cell_slope(c);
    const double c1 = slope;
    const double c0 = h.values[c] - slope * x[c];
    s += weighted_affine_product(p, x[c], x[c + 1], c0, c1, c0, c1);
  }
  return s;
}

double norm_L_sq(const GridFn& h, double q) {
  if (h.values[0] != 0.0)
    throw DivergentWeightError("norm_L: h(0) must vanish for the weight x^{q-2}");
  return weighted_l2_sq(h, q - 2.0);
}

double norm_L(const GridFn& h, double q) { return std::sqrt(norm_L_sq(h, q)); }

double dirichlet_energy(const GridFn& h) {
  double s = 0.0;
  for (std::size_t c = 0; c < h.grid->cells(); ++c) {
    const double sl = h.cell_slope(c);
    s += sl * sl * h.grid->dx(c);
  }
  return s;
}

double norm_H(const GridFn& h, double q) {
  if (h.values.back() != 0.0)
    throw DivergentWeightError("norm_H: h(1) must vanish");
  return std::sqrt(norm_L_sq(h, q) + dirichlet_energy(h));
}

double norm_C1(const GridFn& h) {
  double vmax = 0.0, smax = 0.0;
  for (double v : h.values) vmax = std::max(vmax, std::abs(v));
  for (std::size_t c = 0; c < h.grid->cells(); ++c)
    smax = std::max(smax, std::abs(h.cell_slope(c)));
  return vmax + smax;
}

double sup_ratio(const GridFn& u) {
  if (u.values[0] != 0.0)
    throw DivergentWeightError("sup_ratio: u(0) must vanish");
  double r = 0.0;
  for (std::size_t i = 1; i < u.values.size(); ++i)
    r = std::max(r, u.values[i] / u.grid->nodes[i]);
  return r;
}

}  // namespace kslab
