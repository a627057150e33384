#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "kslab/errors.hpp"

namespace kslab {

// Mesh on [0,1]: nodes x_i = (i/n)^gamma, gamma >= 1 (gamma = 1 uniform).
struct Grid {
  std::vector<double> nodes;
  double grading = 1.0;

  static std::shared_ptr<const Grid> make(std::size_t n, double gamma = 1.0) {
    if (n < 8) throw DomainError("Grid: need n >= 8");
    if (gamma < 1.0) throw DomainError("Grid: grading exponent must be >= 1");
    auto g = std::make_shared<Grid>();
    g->grading = gamma;
    g->nodes.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      double s = static_cast<double>(i) / static_cast<double>(n);
      g->nodes[i] = gamma == 1.0 ? s : std::pow(s, gamma);
    }
    g->nodes[0] = 0.0;
    g->nodes[n] = 1.0;
    return g;
  }

  std::size_t cells() const { return nodes.size() - 1; }
  double dx(std::size_t c) const { return nodes[c + 1] - nodes[c]; }
};

using GridPtr = std::shared_ptr<const Grid>;

// Nodal samples of a function on a shared grid.
struct GridFn {
  GridPtr grid;
  std::vector<double> values;

  GridFn() = default;
  explicit GridFn(GridPtr g) : grid(std::move(g)), values(grid->nodes.size(), 0.0) {}

  template <typename F>
  static GridFn sample(GridPtr g, F&& f) {
    GridFn fn(g);
    for (std::size_t i = 0; i < fn.values.size(); ++i) fn.values[i] = f(g->nodes[i]);
    return fn;
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  // slope of the P1 interpolant on cell c
  double cell_slope(std::size_t c) const {
    return (values[c + 1] - values[c]) / grid->dx(c);
  }
};

inline GridFn operator-(const GridFn& a, const GridFn& b) {
  GridFn r(a.grid);
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] = a.values[i] - b.values[i];
  return r;
}

}  // namespace kslab
