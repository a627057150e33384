#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "kslab/model.hpp"
#include "kslab/numerics.hpp"

namespace kslab {

// Tabulated normalized steady state: solution of
//     x^{2-q} d2U + U (dU)^q = 0,   U(0) = 0, dU(0) = 1,  q = 2/N,
// together with the first zero A of dU and the maximum M = U(A).
// The family U_a is reached by dilation, U_a(x) = U1(a x).
struct SteadyProfile {
  int N = 2;
  double q = 1.0;
  std::vector<double> xs;    // sample abscissae, xs[0] = 0
  std::vector<double> U1;    // U1 samples
  std::vector<double> dU1;   // dU1 samples, dU1[0] = 1
  std::vector<double> ddU1;  // d2U1 samples (interior only; [0] is the limit)
  double A = std::numeric_limits<double>::infinity();
  double M = 0.0;
  double tol = 0.0;
  double x0 = 0.0;  // series/integrator handover abscissa

  // interpolants over [xs[1], xs.back()]; below xs[1] the local series is used
  HermiteSpline u_spline, du_spline;
};

// Integrates the profile ODE. The degenerate point x = 0 is exited with the
// local series U1(x) = x - x^{1+q}/(q(1+q)) + c2 x^{1+2q}, handed over to the
// adaptive integrator at x0 = tol^{1/(1+q)}. For N >= 3 the zero of dU1 is
// degenerate (dU1 ~ (A-x)^{1/(1-q)}), so the integration runs in the
// substituted variable W = dU1^{1-q}/(1-q), whose zero at A is transversal
// and is located by bisection on the dense output. For N = 2, A = +inf and
// M = 2.
SteadyProfile build_profile(int N, double tol);

// Normalized profile and derivatives at y = a*x; series below xs[1].
double eval_U1(const SteadyProfile& p, double y);
double eval_dU1(const SteadyProfile& p, double y);
double eval_ddU1(const SteadyProfile& p, double y);

// U_a(x) = U1(a x); eval_U(p, 0, x) = 0.
double eval_U(const SteadyProfile& p, double a, double x);

// d/dx U_a(x) = a dU1(a x).
double eval_dU(const SteadyProfile& p, double a, double x);

// Inverse of a -> U_a(1) on the subcritical branch: |U1(a) - m| <= tol.
// Throws SupercriticalError for m >= M.
double solve_a_of_m(const SteadyProfile& p, double m);

// w_a(x) = d/da U_a(x) = x dU1(a x); positive on (0,1] for 0 < a < A.
double eval_wa(const SteadyProfile& p, double a, double x);

// d/dx w_a(x) = dU1(y) - U1(y) dU1(y)^q y^{q-1} at y = a x (via the ODE).
double eval_dwa(const SteadyProfile& p, double a, double x);

// CSV export: metadata line `# N=<n> A=<a|inf> M=<m> tol=<tol>`,
// header `x,U1,dU1`, 17 significant digits.
void write_profile_csv(const SteadyProfile& p, std::ostream& os);

}  // namespace kslab
