#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "kslab/errors.hpp"
#include "kslab/numerics.hpp"
#include "oracles.hpp"

using namespace kslab;

namespace {

std::vector<double> tridiag_apply(const std::vector<double>& lower,
                                  const std::vector<double>& diag,
                                  const std::vector<double>& upper,
                                  const std::vector<double>& x) {
  const std::size_t n = diag.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = diag[i] * x[i];
    if (i > 0) y[i] += lower[i - 1] * x[i - 1];
    if (i + 1 < n) y[i] += upper[i] * x[i + 1];
  }
  return y;
}

}  // namespace

TEST_CASE("tridiagonal solve reproduces a random dominant system") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial) * 7;
    std::vector<double> lo(n - 1), di(n), up(n - 1), x(n);
    for (auto& v : lo) v = u(rng);
    for (auto& v : up) v = u(rng);
    for (auto& v : x) v = u(rng);
    for (std::size_t i = 0; i < n; ++i) di[i] = 3.0 + u(rng);
    const auto b = tridiag_apply(lo, di, up, x);
    const auto got = solve_tridiagonal(lo, di, up, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-11));
  }
}

TEST_CASE("tridiagonal solve rejects a singular matrix") {
  CHECK_THROWS_AS(solve_tridiagonal({1.0}, {0.0, 1.0}, {1.0}, {1.0, 1.0}),
                  LinearAlgebraError);
}

TEST_CASE("tridiagonal LDLT solves a symmetric positive definite system") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 40;
  std::vector<double> di(n), off(n - 1), x(n);
  for (auto& v : off) v = u(rng);
  for (auto& v : x) v = u(rng);
  for (std::size_t i = 0; i < n; ++i) di[i] = 2.5 + u(rng);
  const auto b = tridiag_apply(off, di, off, x);
  TridiagonalLDLT fac(di, off);
  std::vector<double> got = b;
  fac.solve_in_place(got);
  for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-11));
}

TEST_CASE("tridiagonal LDLT rejects an indefinite matrix") {
  CHECK_THROWS_AS(TridiagonalLDLT({1.0, -2.0, 1.0}, {0.1, 0.1}), LinearAlgebraError);
}

TEST_CASE("finite-difference weights recover classic stencils") {
  const auto w2 = fd_weights(0.0, {-1.0, 0.0, 1.0}, 2);
  CHECK(w2[0] == doctest::Approx(1.0));
  CHECK(w2[1] == doctest::Approx(-2.0));
  CHECK(w2[2] == doctest::Approx(1.0));

  const auto w1 = fd_weights(0.0, {-1.0, 0.0, 1.0}, 1);
  CHECK(w1[0] == doctest::Approx(-0.5));
  CHECK(w1[1] == doctest::Approx(0.0));
  CHECK(w1[2] == doctest::Approx(0.5));
}

TEST_CASE("finite-difference weights are exact on polynomials, any nodes") {
  const std::vector<double> xs{0.0, 0.13, 0.4, 0.71, 1.0};
  const double x0 = 0.37;
  // f(x) = x^4 - 2x^2 + 3x; f'(x) = 4x^3 - 4x + 3; f''(x) = 12x^2 - 4.
  auto f = [](double x) { return x * x * x * x - 2 * x * x + 3 * x; };
  const double d1 = 4 * x0 * x0 * x0 - 4 * x0 + 3;
  const double d2 = 12 * x0 * x0 - 4;
  for (int order = 1; order <= 2; ++order) {
    const auto w = fd_weights(x0, xs, order);
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += w[i] * f(xs[i]);
    CHECK(s == doctest::Approx(order == 1 ? d1 : d2).epsilon(1e-10));
  }
}

TEST_CASE("gauss rules integrate their guaranteed degree exactly") {
  for (int npts : {4, 5}) {
    const int degree = 2 * npts - 1;
    for (int p = 0; p <= degree; ++p) {
      const double got = gauss_integrate([p](double x) { return std::pow(x, p); },
                                         0.3, 1.7, npts);
      const double want = (std::pow(1.7, p + 1) - std::pow(0.3, p + 1)) / (p + 1);
      CHECK(got == doctest::Approx(want).epsilon(1e-13));
    }
  }
}

TEST_CASE("gauss rule agrees with adaptive quadrature on a smooth integrand") {
  auto f = [](double x) { return std::exp(-x) * std::cos(3 * x); };
  const double want = oracles::integrate(f, 0.0, 1.0, 1e-14);
  CHECK(gauss_integrate(f, 0.0, 1.0, 5) == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("hermite spline reproduces a cubic exactly") {
  auto f = [](double x) { return x * x * x - x + 2; };
  auto df = [](double x) { return 3 * x * x - 1; };
  std::vector<double> xs{0.0, 0.3, 0.55, 1.0}, ys, ms;
  for (double x : xs) {
    ys.push_back(f(x));
    ms.push_back(df(x));
  }
  HermiteSpline s(xs, ys, ms, false);
  for (double x = 0.0; x <= 1.0; x += 0.01) {
    CHECK(s.value(x) == doctest::Approx(f(x)).epsilon(1e-13));
    CHECK(s.deriv(x) == doctest::Approx(df(x)).epsilon(1e-12));
  }
}

TEST_CASE("monotone-limited spline never decreases on increasing data") {
  // Deliberately bad prescribed slopes; the filter has to save monotonicity.
  std::vector<double> xs{0.0, 0.1, 0.5, 0.6, 1.0};
  std::vector<double> ys{0.0, 0.5, 0.52, 0.9, 1.0};
  std::vector<double> ms{10.0, -3.0, 8.0, 4.0, -1.0};
  HermiteSpline s(xs, ys, ms, true);
  double prev = s.value(0.0);
  for (double x = 0.001; x <= 1.0; x += 0.001) {
    const double v = s.value(x);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("spline derivative matches a centered difference of its own values") {
  std::vector<double> xs{0.0, 0.2, 0.7, 1.0};
  std::vector<double> ys{0.0, 0.3, 0.6, 1.0};
  std::vector<double> ms{1.5, 1.2, 0.8, 2.0};
  HermiteSpline s(xs, ys, ms, true);
  const double h = 1e-6;
  for (double x : {0.1, 0.35, 0.5, 0.85}) {
    const double fd = (s.value(x + h) - s.value(x - h)) / (2 * h);
    CHECK(s.deriv(x) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("spline evaluation outside the table throws") {
  HermiteSpline s({0.0, 1.0}, {0.0, 1.0}, {1.0, 1.0}, false);
  CHECK_THROWS_AS(s.value(-0.1), RangeError);
  CHECK_THROWS_AS(s.value(1.1), RangeError);
}
