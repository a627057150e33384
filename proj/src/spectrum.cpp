#include "kslab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kslab/errors.hpp"
#include "kslab/norms.hpp"
#include "kslab/numerics.hpp"

namespace kslab {

namespace {

void require_interior(const GridFn& h, const char* who) {
  if (h.values.front() != 0.0 || h.values.back() != 0.0)
    throw DomainError(std::string(who) + ": needs h(0) = h(1) = 0");
}

// Tent-function mass entries against x^p on one cell, exact.
struct CellTents {
  double lo, hi, h;
  // left tent (node at lo end of support is elsewhere): value (hi - x)/h
  double left_c0() const { return hi / h; }
  double left_c1() const { return -1.0 / h; }
  // right tent: value (x - lo)/h
  double right_c0() const { return -lo / h; }
  double right_c1() const { return 1.0 / h; }
};

template <typename Weight>
SpectralPencil assemble_impl(GridPtr grid, double a, Weight&& inv_stiff_weight,
                             double mass_power) {
  const auto& x = grid->nodes;
  const std::size_t n = grid->cells();
  SpectralPencil P;
  P.grid = grid;
  P.a = a;
  P.K_diag.assign(n - 1, 0.0);
  P.K_off.assign(n - 2, 0.0);
  P.Mw_diag.assign(n - 1, 0.0);
  P.Mw_off.assign(n - 2, 0.0);

  for (std::size_t c = 0; c < n; ++c) {
    const CellTents t{x[c], x[c + 1], x[c + 1] - x[c]};
    // stiffness: tents have slopes -/+ 1/h on the cell
    const double wq = gauss_integrate(inv_stiff_weight, t.lo, t.hi, 5);
    const double k = wq / (t.h * t.h);
    // mass: exact integrals of tent products against x^mass_power
    const double mll =
        weighted_affine_product(mass_power, t.lo, t.hi, t.left_c0(), t.left_c1(),
                                t.left_c0(), t.left_c1());
    const double mrr =
        weighted_affine_product(mass_power, t.lo, t.hi, t.right_c0(), t.right_c1(),
                                t.right_c0(), t.right_c1());
    const double mlr =
        weighted_affine_product(mass_power, t.lo, t.hi, t.left_c0(), t.left_c1(),
                                t.right_c0(), t.right_c1());
    // cell c couples interior nodes c-1 (left tent) and c (right tent)
    if (c > 0) {
      P.K_diag[c - 1] += k;
      P.Mw_diag[c - 1] += mll;
    }
    if (c < n - 1) {
      P.K_diag[c] += k;
      P.Mw_diag[c] += mrr;
    }
    if (c > 0 && c < n - 1) {
      P.K_off[c - 1] += -k;
      P.Mw_off[c - 1] += mlr;
    }
  }
  return P;
}

std::vector<double> tri_apply(const std::vector<double>& d, const std::vector<double>& o,
                              const std::vector<double>& v) {
  const std::size_t n = d.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = d[i] * v[i];
    if (i > 0) y[i] += o[i - 1] * v[i - 1];
    if (i + 1 < n) y[i] += o[i] * v[i + 1];
  }
  return y;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SpectralPencil assemble(GridPtr grid, double a, const SteadyProfile& p) {
  if (!(a > 0.0) || a >= p.A)
    throw DomainError("assemble: need 0 < a < A for a positive stiffness weight");
  const double q = p.q;
  auto w = [&](double x) { return std::pow(eval_dU(p, a, x), -q); };
  return assemble_impl(std::move(grid), a, w, q - 2.0);
}

SpectralPencil assemble_classic_hardy(GridPtr grid) {
  return assemble_impl(std::move(grid), 0.0, [](double) { return 1.0; }, -2.0);
}

double rayleigh_quotient(const SpectralPencil& pencil, const GridFn& h) {
  require_interior(h, "rayleigh_quotient");
  const std::size_t m = pencil.order();
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = h.values[i + 1];
  const double num = dot(v, tri_apply(pencil.K_diag, pencil.K_off, v));
  const double den = dot(v, tri_apply(pencil.Mw_diag, pencil.Mw_off, v));
  if (den <= 0.0) throw DomainError("rayleigh_quotient: zero function");
  return num / den;
}

EigenPair smallest_eigenpair(const SpectralPencil& pencil,
                             const std::vector<double>* deflate) {
  const std::size_t m = pencil.order();
  TridiagonalLDLT K(pencil.K_diag, pencil.K_off);

  auto mw = [&](const std::vector<double>& v) {
    return tri_apply(pencil.Mw_diag, pencil.Mw_off, v);
  };
  auto mw_norm_sq = [&](const std::vector<double>& v) { return dot(v, mw(v)); };
  auto deflate_against = [&](std::vector<double>& v) {
    if (!deflate) return;
    const double c = dot(*deflate, mw(v));  // deflate is Mw-normalized
    for (std::size_t i = 0; i < m; ++i) v[i] -= c * (*deflate)[i];
  };

  // start from a positive bump; orthogonalize when deflating
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = pencil.grid->nodes[i + 1];
    v[i] = deflate ? x * (1.0 - x) * (0.5 - x) : x * (1.0 - x);
  }
  deflate_against(v);
  double nrm = std::sqrt(mw_norm_sq(v));
  for (auto& c : v) c /= nrm;

  const int max_iters = 50000;
  double rho_prev = std::numeric_limits<double>::infinity();
  // At large orders the Rayleigh quotient stalls at its roundoff floor before
  // the primary tolerance; accept the stall if the floor is already tight.
  double best_delta = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  for (int it = 1; it <= max_iters; ++it) {
    std::vector<double> y = mw(v);
    K.solve_in_place(y);  // y = K^{-1} Mw v
    deflate_against(y);
    nrm = std::sqrt(mw_norm_sq(y));
    if (!(nrm > 0.0)) throw SpectralError("inverse iteration collapsed", rho_prev);
    for (auto& c : y) c /= nrm;
    const double rho = dot(y, tri_apply(pencil.K_diag, pencil.K_off, y));
    v = std::move(y);
    const double delta = std::abs(rho - rho_prev);
    if (delta < 1e-12 * std::max(1.0, std::abs(rho))) return EigenPair{rho, std::move(v), it};
    if (delta < 0.9 * best_delta) {
      best_delta = delta;
      stagnant = 0;
    } else if (++stagnant >= 30) {
      if (best_delta <= 1e-9 * std::max(1.0, std::abs(rho))) return EigenPair{rho, std::move(v), it};
      throw SpectralError("inverse iteration stalled before reaching tolerance", rho);
    }
    rho_prev = rho;
  }
  throw SpectralError("inverse iteration did not converge", rho_prev);
}

namespace {

double lambda1_value(GridPtr grid, double a, const SteadyProfile& p, EigenPair* out,
                     double* lambda2) {
  const SpectralPencil P = assemble(grid, a, p);
  EigenPair e1 = smallest_eigenpair(P);
  if (lambda2) *lambda2 = smallest_eigenpair(P, &e1.interior).lambda;
  const double l1 = e1.lambda;
  if (out) *out = std::move(e1);
  return l1;
}

}  // namespace

SpectralResult solve_lambda1(GridPtr grid, double a, const SteadyProfile& p) {
  SpectralResult r;
  EigenPair e1;
  r.lambda1 = lambda1_value(grid, a, p, &e1, &r.lambda2);
  r.iterations = e1.iterations;

  const GridPtr fine = Grid::make(2 * grid->cells(), grid->grading);
  r.refinement_gap = std::abs(lambda1_value(fine, a, p, nullptr, nullptr) - r.lambda1);

  r.phi1 = GridFn(grid);
  double mean = 0.0;
  for (std::size_t i = 0; i < e1.interior.size(); ++i) mean += e1.interior[i];
  const double sign = mean >= 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < e1.interior.size(); ++i)
    r.phi1.values[i + 1] = sign * e1.interior[i];
  const double nl = norm_L(r.phi1, p.q);
  for (auto& c : r.phi1.values) c /= nl;
  return r;
}

double beesack_residual(const GridFn& h, double a, const SteadyProfile& p) {
  require_interior(h, "beesack_residual");
  if (!(a > 0.0) || a >= p.A) throw DomainError("beesack_residual: need 0 < a < A");
  const double q = p.q;
  const auto& x = h.grid->nodes;

  double I1 = 0.0, I3 = 0.0;
  for (std::size_t c = 0; c < h.grid->cells(); ++c) {
    const double s = h.cell_slope(c);
    I1 += s * s * gauss_integrate(
                      [&](double t) { return std::pow(eval_dU(p, a, t), -q); },
                      x[c], x[c + 1], 5);
    if (c == 0) continue;  // w_a -> 0 there; omitted piece O(x1^{1+2q})
    I3 += gauss_integrate(
        [&](double t) {
          const double hv = h.values[c] + s * (t - x[c]);
          const double g = s - eval_dwa(p, a, t) / eval_wa(p, a, t) * hv;
          return g * g * std::pow(eval_dU(p, a, t), -q);
        },
        x[c], x[c + 1], 5);
  }
  const double I2 = weighted_l2_sq(h, q - 2.0);
  return std::abs(I1 - I2 - I3);
}

GridFn apply_linearized(const GridFn& h, double a, const SteadyProfile& p) {
  require_interior(h, "apply_linearized");
  const double q = p.q;
  const auto& x = h.grid->nodes;
  GridFn out(h.grid);
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
    const double dh = (-hr / hl * h.values[i - 1] + (hr / hl - hl / hr) * h.values[i] +
                       hl / hr * h.values[i + 1]) /
                      (hl + hr);
    const double ddh = 2.0 * (h.values[i - 1] / (hl * (hl + hr)) -
                              h.values[i] / (hl * hr) +
                              h.values[i + 1] / (hr * (hl + hr)));
    const double U = eval_U(p, a, x[i]);
    const double dU = eval_dU(p, a, x[i]);
    out.values[i] = std::pow(x[i], 2.0 - q) * ddh + q * U * std::pow(dU, q - 1.0) * dh +
                    std::pow(dU, q) * h.values[i];
  }
  return out;
}

GridFn apply_linearized_div(const GridFn& h, double a, const SteadyProfile& p) {
  require_interior(h, "apply_linearized_div");
  const double q = p.q;
  const auto& x = h.grid->nodes;
  GridFn out(h.grid);
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    const double xm = 0.5 * (x[i - 1] + x[i]), xp = 0.5 * (x[i] + x[i + 1]);
    const double fm = h.cell_slope(i - 1) / std::pow(eval_dU(p, a, xm), q);
    const double fp = h.cell_slope(i) / std::pow(eval_dU(p, a, xp), q);
    const double div = (fp - fm) / (xp - xm);
    const double dU = eval_dU(p, a, x[i]);
    out.values[i] =
        std::pow(x[i], 2.0 - q) * std::pow(dU, q) * div + std::pow(dU, q) * h.values[i];
  }
  return out;
}

GridFn apply_linearized(const GridFn& h, const GridFn& dh, const GridFn& ddh, double a,
                        const SteadyProfile& p) {
  require_interior(h, "apply_linearized");
  const double q = p.q;
  const auto& x = h.grid->nodes;
  GridFn out(h.grid);
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    const double U = eval_U(p, a, x[i]);
    const double dU = eval_dU(p, a, x[i]);
    out.values[i] = std::pow(x[i], 2.0 - q) * ddh.values[i] +
                    q * U * std::pow(dU, q - 1.0) * dh.values[i] +
                    std::pow(dU, q) * h.values[i];
  }
  return out;
}

GridFn remainder(const GridFn& h, const GridFn& dh, double a, const SteadyProfile& p) {
  const double q = p.q;
  const auto& x = h.grid->nodes;
  GridFn out(h.grid);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double U = eval_U(p, a, x[i]);
    const double dU = eval_dU(p, a, x[i]);
    const double r = dh.values[i] / dU;
    if (1.0 + r <= 0.0)
      throw DomainError("remainder: slope perturbation leaves the linearization regime");
    const double bracket = std::pow(1.0 + r, q) - 1.0 - q * r;
    out.values[i] = q * h.values[i] * dh.values[i] * std::pow(dU, q - 1.0) +
                    (h.values[i] + U) * std::pow(dU, q) * bracket;
  }
  return out;
}

double lemma41_residual(const GridFn& h, double a, const SteadyProfile& p) {
  require_interior(h, "lemma41_residual");
  const double q = p.q;
  const auto& x = h.grid->nodes;
  const GridFn Lh = apply_linearized(h, a, p);

  // trapezoid of h Lh / (x^{2-q} dU_a^q); both end values vanish in the limit
  double lhs = 0.0;
  std::vector<double> g(h.size(), 0.0);
  for (std::size_t i = 1; i + 1 < h.size(); ++i)
    g[i] = h.values[i] * Lh.values[i] /
           (std::pow(x[i], 2.0 - q) * std::pow(eval_dU(p, a, x[i]), q));
  for (std::size_t c = 0; c < h.grid->cells(); ++c)
    lhs += 0.5 * (g[c] + g[c + 1]) * h.grid->dx(c);

  double I1 = 0.0;
  for (std::size_t c = 0; c < h.grid->cells(); ++c) {
    const double s = h.cell_slope(c);
    I1 += s * s * gauss_integrate(
                      [&](double t) { return std::pow(eval_dU(p, a, t), -q); },
                      x[c], x[c + 1], 5);
  }
  const double I2 = weighted_l2_sq(h, q - 2.0);
  return std::abs(lhs + I1 - I2);
}

}  // namespace kslab
