#include "kslab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "kslab/errors.hpp"

namespace kslab {

std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      std::vector<double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  std::vector<double> c(n - 1);
  double piv = diag[0];
  if (piv == 0.0) throw LinearAlgebraError("tridiagonal solve: zero pivot at row 0");
  if (n > 1) c[0] = upper[0] / piv;
  rhs[0] /= piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - lower[i - 1] * c[i - 1];
    if (piv == 0.0)
      throw LinearAlgebraError("tridiagonal solve: zero pivot at row " + std::to_string(i));
    if (i + 1 < n) c[i] = upper[i] / piv;
    rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

TridiagonalLDLT::TridiagonalLDLT(const std::vector<double>& diag,
                                 const std::vector<double>& off) {
  const std::size_t n = diag.size();
  d_.resize(n);
  l_.resize(n > 0 ? n - 1 : 0);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double di = diag[i] - (i > 0 ? l_[i - 1] * l_[i - 1] * prev : 0.0);
    if (di <= 0.0)
      throw LinearAlgebraError("LDL^T: nonpositive pivot at row " + std::to_string(i));
    d_[i] = di;
    if (i + 1 < n) l_[i] = off[i] / di;
    prev = di;
  }
}

void TridiagonalLDLT::solve_in_place(std::vector<double>& b) const {
  const std::size_t n = d_.size();
  for (std::size_t i = 1; i < n; ++i) b[i] -= l_[i - 1] * b[i - 1];
  for (std::size_t i = 0; i < n; ++i) b[i] /= d_[i];
  for (std::size_t i = n - 1; i-- > 0;) b[i] -= l_[i] * b[i + 1];
}

std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int order) {
  // Fornberg, Math. Comp. 51 (1988). c[k][i] ~ weight of node i for the
  // k-th derivative; only derivative `order` is kept.
  const int n = static_cast<int>(xs.size()) - 1;
  const int m = order;
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n + 1, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c[m];
}

const GaussRule& gauss_rule(int npts) {
  static const GaussRule g4{
      {-0.86113631159405258, -0.33998104358485626, 0.33998104358485626,
       0.86113631159405258},
      {0.34785484513745386, 0.65214515486254614, 0.65214515486254614,
       0.34785484513745386}};
  static const GaussRule g5{
      {-0.90617984593866399, -0.53846931010568309, 0.0, 0.53846931010568309,
       0.90617984593866399},
      {0.23692688505618909, 0.47862867049936647, 0.56888888888888889,
       0.47862867049936647, 0.23692688505618909}};
  if (npts == 4) return g4;
  if (npts == 5) return g5;
  throw DomainError("gauss_rule: unsupported point count");
}

namespace {

// Hyman-style slope limiter for monotone data: clip each nodal slope to the
// monotone-safe interval [0, 3*min(|adjacent secants|)] with matching sign.
void limit_slopes(const std::vector<double>& xs, const std::vector<double>& ys,
                  std::vector<double>& ms) {
  const std::size_t n = xs.size();
  if (n < 2) return;
  std::vector<double> sec(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    sec[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
  for (std::size_t i = 0; i < n; ++i) {
    const double sl = i > 0 ? sec[i - 1] : sec[0];
    const double sr = i + 1 < n ? sec[i] : sec[n - 2];
    if (sl * sr < 0.0) {
      ms[i] = 0.0;
      continue;
    }
    const double bound = 3.0 * std::min(std::abs(sl), std::abs(sr));
    const double sgn = (sl + sr) >= 0.0 ? 1.0 : -1.0;
    if (ms[i] * sgn < 0.0)
      ms[i] = 0.0;
    else if (std::abs(ms[i]) > bound)
      ms[i] = sgn * bound;
  }
}

}  // namespace

HermiteSpline::HermiteSpline(std::vector<double> xs, std::vector<double> ys,
                             std::vector<double> slopes, bool limit_monotone)
    : xs_(std::move(xs)), ys_(std::move(ys)), ms_(std::move(slopes)) {
  if (xs_.size() < 2 || xs_.size() != ys_.size() || xs_.size() != ms_.size())
    throw DomainError("HermiteSpline: inconsistent table sizes");
  if (limit_monotone) limit_slopes(xs_, ys_, ms_);
}

std::size_t HermiteSpline::locate(double x) const {
  if (x < xs_.front() || x > xs_.back())
    throw RangeError("HermiteSpline: evaluation outside table");
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  if (i == 0) return 0;
  if (i >= xs_.size()) return xs_.size() - 2;
  return i - 1;
}

double HermiteSpline::value(double x) const {
  const std::size_t i = locate(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * ys_[i] + (t3 - 2 * t2 + t) * h * ms_[i] +
         (-2 * t3 + 3 * t2) * ys_[i + 1] + (t3 - t2) * h * ms_[i + 1];
}

double HermiteSpline::deriv(double x) const {
  const std::size_t i = locate(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * ys_[i] + (3 * t2 - 4 * t + 1) * h * ms_[i] +
          (-6 * t2 + 6 * t) * ys_[i + 1] + (3 * t2 - 2 * t) * h * ms_[i + 1]) /
         h;
}

}  // namespace kslab
