#pragma once

#include "kslab/errors.hpp"

namespace kslab {

// Problem parameters. The exponent q is tied to the dimension, q = 2/N,
// and is never settable on its own.
struct ModelParams {
  int N = 2;       // spatial dimension of the underlying model, >= 2
  double m = 0.0;  // boundary mass, u(t,1) = m

  double q() const { return 2.0 / N; }

  void validate() const {
    if (N < 2) throw DomainError("ModelParams: N must be >= 2");
    if (m < 0.0) throw DomainError("ModelParams: m must be >= 0");
  }
};

}  // namespace kslab
