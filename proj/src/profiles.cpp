#include "kslab/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <boost/numeric/odeint.hpp>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

constexpr double kXMax = 64.0;       // no zero of dU1 before here -> A = +inf
constexpr std::size_t kMaxSteps = 20'000'000;

struct Series {
  double q, c1, c2;

  explicit Series(double q_) : q(q_) {
    c1 = -1.0 / (q * (1.0 + q));
    c2 = (1.0 + q + q * q) / (2.0 * q * q * (1.0 + q) * (1.0 + 2.0 * q));
  }
  double U(double y) const {
    return y + c1 * std::pow(y, 1.0 + q) + c2 * std::pow(y, 1.0 + 2.0 * q);
  }
  double dU(double y) const {
    return 1.0 + c1 * (1.0 + q) * std::pow(y, q) +
           c2 * (1.0 + 2.0 * q) * std::pow(y, 2.0 * q);
  }
  double ddU(double y) const {
    return c1 * (1.0 + q) * q * std::pow(y, q - 1.0) +
           c2 * (1.0 + 2.0 * q) * 2.0 * q * std::pow(y, 2.0 * q - 1.0);
  }
};

double ode_d2U(double x, double U, double dU, double q) {
  return -U * std::pow(std::max(dU, 0.0), q) * std::pow(x, q - 2.0);
}

// Tabulation step policy: near the handover point an arithmetic step of x0,
// then geometric growth, capped at 1.5e-3 * max(1, x) so cubic
// interpolation of the table stays below ~1e-9 everywhere.
double next_dx(double x, double x0) {
  return std::min(std::max(0.08 * x, x0), 1.5e-3 * std::max(1.0, x));
}

struct Table {
  std::vector<double> xs, U, dU, ddU;
  void push(double x, double u, double du, double ddu) {
    xs.push_back(x);
    U.push_back(u);
    dU.push_back(du);
    ddU.push_back(ddu);
  }
};

}  // namespace

SteadyProfile build_profile(int N, double tol) {
  if (N < 2) throw DomainError("build_profile: N must be >= 2");
  if (!(tol > 0.0)) throw DomainError("build_profile: tol must be positive");

  SteadyProfile p;
  p.N = N;
  p.q = 2.0 / N;
  p.tol = tol;
  const double q = p.q;
  const Series ser(q);

  const double x0 = std::pow(tol, 1.0 / (1.0 + q));
  p.x0 = x0;

  Table tab;
  tab.push(0.0, 0.0, 1.0, q == 1.0 ? -1.0 : -std::numeric_limits<double>::infinity());
  for (double y : {0.25 * x0, 0.5 * x0})
    tab.push(y, ser.U(y), ser.dU(y), ser.ddU(y));

  const double atol = 1e-2 * tol, rtol = 1e-2 * tol;
  std::size_t steps = 0;

  if (N == 2) {
    // q = 1: dU1 never vanishes; integrate (U, dU) to x_max.
    auto rhs = [q](const State& y, State& dydx, double x) {
      dydx[0] = y[1];
      dydx[1] = ode_d2U(x, y[0], y[1], q);
    };
    auto stepper = odeint::make_dense_output(atol, rtol, odeint::runge_kutta_dopri5<State>());
    State y{ser.U(x0), ser.dU(x0)};
    stepper.initialize(y, x0, x0 / 8.0);
    double next_node = x0;
    while (true) {
      if (++steps > kMaxSteps)
        throw IntegrationError("build_profile: step limit exceeded", stepper.current_time());
      stepper.do_step(rhs);
      const double xc = stepper.current_time();
      if (stepper.current_state()[1] < -tol)
        throw ModelViolationError("build_profile: dU1 went negative for N=2");
      while (next_node <= std::min(xc, kXMax)) {
        State yi;
        stepper.calc_state(next_node, yi);
        tab.push(next_node, yi[0], yi[1], ode_d2U(next_node, yi[0], yi[1], q));
        next_node += next_dx(next_node, x0);
      }
      if (xc >= kXMax) {
        if (tab.xs.back() < kXMax) {
          State yi;
          stepper.calc_state(kXMax, yi);
          tab.push(kXMax, yi[0], yi[1], ode_d2U(kXMax, yi[0], yi[1], q));
        }
        break;
      }
    }
    p.A = std::numeric_limits<double>::infinity();
    p.M = 2.0;
  } else {
    // q < 1: substitute W = dU1^{1-q}/(1-q); then W' = -U x^{q-2} and the
    // event W = 0 at A is a simple zero. V is recovered as ((1-q)W)^{1/(1-q)}.
    const double e = 1.0 / (1.0 - q);
    auto VofW = [e, q](double W) {
      return std::pow(std::max((1.0 - q) * W, 0.0), e);
    };
    auto rhs = [q, VofW](const State& y, State& dydx, double x) {
      dydx[0] = VofW(y[1]);
      dydx[1] = -y[0] * std::pow(x, q - 2.0);
    };
    auto stepper = odeint::make_dense_output(atol, rtol, odeint::runge_kutta_dopri5<State>());
    const double V0 = ser.dU(x0);
    State y{ser.U(x0), std::pow(V0, 1.0 - q) / (1.0 - q)};
    stepper.initialize(y, x0, x0 / 8.0);
    double next_node = x0;
    double A = std::numeric_limits<double>::infinity();
    while (true) {
      if (++steps > kMaxSteps)
        throw IntegrationError("build_profile: step limit exceeded", stepper.current_time());
      const double xp = stepper.current_time();
      stepper.do_step(rhs);
      const double xc = stepper.current_time();
      const bool crossed = stepper.current_state()[1] <= 0.0;
      double fill_to = xc;
      if (crossed) {
        double lo = xp, hi = xc;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          State yi;
          stepper.calc_state(mid, yi);
          (yi[1] > 0.0 ? lo : hi) = mid;
        }
        A = 0.5 * (lo + hi);
        fill_to = A * (1.0 - 1e-12);
      }
      while (next_node <= fill_to) {
        State yi;
        stepper.calc_state(next_node, yi);
        const double v = VofW(yi[1]);
        tab.push(next_node, yi[0], v, ode_d2U(next_node, yi[0], v, q));
        next_node += next_dx(next_node, x0);
      }
      if (crossed) {
        State yi;
        stepper.calc_state(A, yi);
        tab.push(A, yi[0], 0.0, 0.0);
        p.A = A;
        p.M = yi[0];
        break;
      }
      if (xc >= kXMax) {  // cannot happen for N >= 3; mirrors the N = 2 rule
        p.A = std::numeric_limits<double>::infinity();
        p.M = tab.U.back();
        break;
      }
    }
    if (std::isfinite(p.A)) {
      // flat continuation U1 = M beyond A
      for (int k = 1; k <= 10; ++k) tab.push(p.A * (1.0 + 0.05 * k), p.M, 0.0, 0.0);
    }
  }

  p.xs = std::move(tab.xs);
  p.U1 = std::move(tab.U);
  p.dU1 = std::move(tab.dU);
  p.ddU1 = std::move(tab.ddU);

  for (std::size_t i = 1; i < p.xs.size(); ++i) {
    if (p.dU1[i] < -tol)
      throw ModelViolationError("build_profile: negative dU1 in table");
    if (p.U1[i] + tol < p.U1[i - 1] || p.dU1[i] > p.dU1[i - 1] + tol)
      throw ModelViolationError("build_profile: monotonicity lost in table");
  }

  const std::vector<double> sx(p.xs.begin() + 1, p.xs.end());
  const std::vector<double> su(p.U1.begin() + 1, p.U1.end());
  const std::vector<double> sdu(p.dU1.begin() + 1, p.dU1.end());
  const std::vector<double> sddu(p.ddU1.begin() + 1, p.ddU1.end());
  p.u_spline = HermiteSpline(sx, su, sdu, true);
  p.du_spline = HermiteSpline(sx, sdu, sddu, true);
  return p;
}

double eval_U1(const SteadyProfile& p, double y) {
  if (y < 0.0) throw RangeError("eval_U1: negative argument");
  if (y < p.u_spline.x_front()) return Series(p.q).U(y);
  if (y > p.xs.back()) throw RangeError("eval_U1: argument beyond tabulated range");
  return p.u_spline.value(y);
}

double eval_dU1(const SteadyProfile& p, double y) {
  if (y < 0.0) throw RangeError("eval_dU1: negative argument");
  if (y < p.du_spline.x_front()) return Series(p.q).dU(y);
  if (y > p.xs.back()) throw RangeError("eval_dU1: argument beyond tabulated range");
  return std::max(p.du_spline.value(y), 0.0);
}

double eval_ddU1(const SteadyProfile& p, double y) {
  if (y <= 0.0) throw RangeError("eval_ddU1: requires y > 0");
  return ode_d2U(y, eval_U1(p, y), eval_dU1(p, y), p.q);
}

double eval_U(const SteadyProfile& p, double a, double x) {
  if (a < 0.0) throw DomainError("eval_U: a must be >= 0");
  if (a == 0.0) return 0.0;
  return eval_U1(p, a * x);
}

double eval_dU(const SteadyProfile& p, double a, double x) {
  if (a < 0.0) throw DomainError("eval_dU: a must be >= 0");
  if (a == 0.0) return 0.0;
  return a * eval_dU1(p, a * x);
}

double solve_a_of_m(const SteadyProfile& p, double m) {
  if (m < 0.0) throw DomainError("solve_a_of_m: m must be >= 0");
  if (m >= p.M)
    throw SupercriticalError("solve_a_of_m: m >= critical mass M = " + std::to_string(p.M));
  if (m == 0.0) return 0.0;

  double lo = 0.0, hi;
  if (std::isfinite(p.A)) {
    hi = p.A;
  } else {
    hi = 1.0;
    while (eval_U1(p, hi) <= m) {
      hi *= 2.0;
      if (hi > p.xs.back())
        throw RangeError("solve_a_of_m: m = " + std::to_string(m) +
                         " lies beyond the tabulated branch (increase x_max)");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (eval_U1(p, mid) < m ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double eval_wa(const SteadyProfile& p, double a, double x) {
  if (!(a > 0.0) || a >= p.A)
    throw DomainError("eval_wa: requires 0 < a < A");
  return x * eval_dU1(p, a * x);
}

double eval_dwa(const SteadyProfile& p, double a, double x) {
  if (!(a > 0.0) || a >= p.A)
    throw DomainError("eval_dwa: requires 0 < a < A");
  const double y = a * x;
  if (y == 0.0) return 1.0;
  const double du = eval_dU1(p, y);
  return du - eval_U1(p, y) * std::pow(du, p.q) * std::pow(y, p.q - 1.0);
}

void write_profile_csv(const SteadyProfile& p, std::ostream& os) {
  char buf[128];
  if (std::isfinite(p.A))
    std::snprintf(buf, sizeof buf, "# N=%d A=%.17g M=%.17g tol=%.17g\n", p.N, p.A,
                  p.M, p.tol);
  else
    std::snprintf(buf, sizeof buf, "# N=%d A=inf M=%.17g tol=%.17g\n", p.N, p.M,
                  p.tol);
  os << buf << "x,U1,dU1\n";
  for (std::size_t i = 0; i < p.xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.xs[i], p.U1[i], p.dU1[i]);
    os << buf;
  }
}

}  // namespace kslab
