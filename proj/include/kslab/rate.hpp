#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kslab/evolution.hpp"
#include "kslab/profiles.hpp"
#include "kslab/spectrum.hpp"

namespace kslab {

// Time series of distances to the steady state in the two norms.
struct NormSeries {
  std::vector<double> times;
  std::vector<double> normL;
  std::vector<double> normC1;
  double floor = 1e-11;  // quadrature noise level; samples below are discarded
};

enum class WhichNorm { L, C1 };

struct RateFit {
  WhichNorm which = WhichNorm::L;
  double slope = 0.0;      // positive = decaying
  double intercept = 0.0;  // ln-scale
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  std::size_t samples = 0;
};

// Distances ||u(t) - U_a|| per snapshot of a trajectory.
NormSeries norm_series_from(const Trajectory& traj, const SteadyProfile& p, double a);

// Unweighted least squares of ln||.|| against t. The default window is
// [max(1, first t with value < 1e-2 of the initial value), last t above the
// floor]; pass an explicit window to override (e.g. when the series plateaus
// at the discrete steady-state gap before reaching the floor).
RateFit fit_rate(const NormSeries& s, WhichNorm which,
                 std::optional<std::pair<double, double>> window = std::nullopt);

// lambda_frac * (lambda1 - 1) * dU_a(1)^q: the guaranteed decay rate at
// fraction lambda_frac of the spectral gap.
double theoretical_rate(double a, double lambda_frac, const SpectralResult& spectral,
                        const SteadyProfile& p);

// ||u(t0+t) - U_a||_C1 * t^beta / ||u(t0) - U_a||_L with beta = 1 + N/4,
// over the snapshots after t0. A steady start (base below floor) gives all
// zeros; the series truncates once the C1 distance falls below the floor.
struct SmoothingPoint {
  double t = 0.0;      // elapsed since t0
  double ratio = 0.0;
};
struct SmoothingSeries {
  double t0 = 0.0;
  double beta = 0.0;
  double base = 0.0;   // ||u(t0) - U_a||_L
  std::vector<SmoothingPoint> points;
  bool truncated = false;
};
SmoothingSeries smoothing_check(const Trajectory& traj, double t0,
                                const SteadyProfile& p, double a);

// Both norms must decay at the same exponential rate: |slope_L - slope_C1|
// within 3x the larger fit standard error.
struct ConsistencyReport {
  double difference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};
ConsistencyReport rate_consistency(const RateFit& fitL, const RateFit& fitC1);

}  // namespace kslab
