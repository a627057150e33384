#pragma once

#include <cstddef>
#include <vector>

namespace kslab {

// Solves a general tridiagonal system by the Thomas algorithm.
// lower/upper have size n-1, diag and rhs size n. Throws LinearAlgebraError
// on a vanishing pivot.
std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      std::vector<double> rhs);

// LDL^T factorization of a symmetric tridiagonal matrix, for repeated solves.
class TridiagonalLDLT {
 public:
  TridiagonalLDLT(const std::vector<double>& diag, const std::vector<double>& off);
  void solve_in_place(std::vector<double>& b) const;

 private:
  std::vector<double> d_;  // pivots
  std::vector<double> l_;  // subdiagonal multipliers
};

// Finite-difference weights on arbitrary nodes (Fornberg's recurrence):
// returns w with sum_i w[i]*f(xs[i]) ~ f^(order)(x0).
std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int order);

// Gauss-Legendre rule on [-1,1]; npts in {4, 5}.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_rule(int npts);

// Integrates f over [a,b] with an n-point Gauss rule.
template <typename F>
double gauss_integrate(F&& f, double a, double b, int npts = 5) {
  const GaussRule& g = gauss_rule(npts);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    s += g.weights[i] * f(mid + half * g.nodes[i]);
  return half * s;
}

// Cubic Hermite interpolant with prescribed nodal slopes. With
// limit_monotone, slopes are clipped node-by-node (Hyman filter) so the
// interpolant cannot overshoot monotone data.
class HermiteSpline {
 public:
  HermiteSpline() = default;
  HermiteSpline(std::vector<double> xs, std::vector<double> ys,
                std::vector<double> slopes, bool limit_monotone);

  double value(double x) const;
  double deriv(double x) const;
  double x_front() const { return xs_.front(); }
  double x_back() const { return xs_.back(); }
  bool empty() const { return xs_.empty(); }

 private:
  std::size_t locate(double x) const;

  std::vector<double> xs_, ys_, ms_;
};

}  // namespace kslab
