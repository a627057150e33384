#pragma once

#include "kslab/grid.hpp"
#include "kslab/model.hpp"

namespace kslab {

// Exact integral of x^p over [a,b], 0 <= a < b. The p = -1 case is the
// logarithmic antiderivative; p <= -1 requires a > 0.
double power_moment(double p, double a, double b);

// Exact integral of (c0 + c1 x)(d0 + d1 x) x^p over [a,b]. Terms whose
// polynomial coefficient is exactly zero are skipped, which makes the a = 0
// cell legal whenever the products vanish there.
double weighted_affine_product(double p, double a, double b, double c0, double c1,
                               double d0, double d1);

// Integral of the squared P1 interpolant of h against weight x^p, exact per
// cell. Requires h(0) = 0 when p < -1 so the first cell stays integrable.
double weighted_l2_sq(const GridFn& h, double p);

// ||h||_L = sqrt(int h^2 / x^{2-q}); throws DivergentWeightError unless h(0)=0.
double norm_L(const GridFn& h, double q);
double norm_L_sq(const GridFn& h, double q);

// ||h||_H = sqrt(||h||_L^2 + int hdot^2); requires h(0) = h(1) = 0.
double norm_H(const GridFn& h, double q);

// Discrete C1 surrogate: max |h_i| + max cell |slope|.
double norm_C1(const GridFn& h);

// N[u] = sup u(x)/x over nodes x_i > 0; requires u(0) = 0.
double sup_ratio(const GridFn& u);

// int hdot^2 over [0,1] from cell slopes (P1-exact).
double dirichlet_energy(const GridFn& h);

}  // namespace kslab
