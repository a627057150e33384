#include "kslab/rate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "kslab/errors.hpp"
#include "kslab/norms.hpp"

namespace kslab {

NormSeries norm_series_from(const Trajectory& traj, const SteadyProfile& p, double a) {
  NormSeries s;
  s.times = traj.times;
  s.normL.reserve(traj.snapshots.size());
  s.normC1.reserve(traj.snapshots.size());
  GridFn steady = GridFn::sample(traj.grid, [&](double x) { return eval_U(p, a, x); });
  for (const auto& u : traj.snapshots) {
    GridFn diff = u - steady;
    s.normL.push_back(norm_L(diff, traj.params.q()));
    s.normC1.push_back(norm_C1(diff));
  }
  return s;
}

RateFit fit_rate(const NormSeries& s, WhichNorm which,
                 std::optional<std::pair<double, double>> window) {
  const std::vector<double>& y = (which == WhichNorm::L) ? s.normL : s.normC1;
  if (y.size() != s.times.size())
    throw DomainError("norm series and time series lengths differ");
  if (y.empty()) throw InsufficientSamplesError("empty norm series");

  double lo, hi;
  if (window) {
    lo = window->first;
    hi = window->second;
    if (!(lo < hi)) throw DomainError("rate fit window must have lo < hi");
  } else {
    const double y0 = y.front();
    lo = 1.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] < 1e-2 * y0) {
        lo = std::max(1.0, s.times[i]);
        break;
      }
    }
    hi = -1.0;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] > s.floor) hi = s.times[i];
    if (hi < lo) throw AllBelowFloorError("norm series is at the floor over the whole fit range");
  }

  std::vector<double> t, z;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (s.times[i] < lo || s.times[i] > hi) continue;
    if (y[i] <= s.floor) continue;
    t.push_back(s.times[i]);
    z.push_back(std::log(y[i]));
  }
  if (t.size() < 10)
    throw InsufficientSamplesError("rate fit window holds fewer than 10 usable samples");

  const std::size_t k = t.size();
  double tbar = 0.0, zbar = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    tbar += t[i];
    zbar += z[i];
  }
  tbar /= static_cast<double>(k);
  zbar /= static_cast<double>(k);
  double stt = 0.0, stz = 0.0, szz = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    stt += (t[i] - tbar) * (t[i] - tbar);
    stz += (t[i] - tbar) * (z[i] - zbar);
    szz += (z[i] - zbar) * (z[i] - zbar);
  }
  if (stt == 0.0) throw InsufficientSamplesError("all samples share one time; slope undefined");
  const double b = stz / stt;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = z[i] - (zbar + b * (t[i] - tbar));
    ss_res += r * r;
  }

  RateFit fit;
  fit.which = which;
  fit.slope = -b;  // decay reported positive
  fit.intercept = zbar - b * tbar;
  fit.slope_stderr = std::sqrt(ss_res / static_cast<double>(k - 2) / stt);
  fit.r_squared = (szz > 0.0) ? 1.0 - ss_res / szz : 1.0;
  // report the window actually fitted: floor filtering may trim the request
  fit.window_lo = t.front();
  fit.window_hi = t.back();
  fit.samples = k;
  return fit;
}

double theoretical_rate(double a, double lambda_frac, const SpectralResult& spectral,
                        const SteadyProfile& p) {
  if (!(lambda_frac >= 0.0 && lambda_frac < 1.0))
    throw DomainError("lambda_frac must lie in [0,1)");
  const double gap = spectral.lambda1 - 1.0;
  if (!(gap > 0.0)) throw DomainError("spectral constant must exceed 1");
  return lambda_frac * gap * std::pow(eval_dU(p, a, 1.0), p.q);
}

SmoothingSeries smoothing_check(const Trajectory& traj, double t0,
                                const SteadyProfile& p, double a) {
  if (!(t0 >= 1.0)) throw DomainError("smoothing check needs t0 >= 1 (past the initial transient)");
  NormSeries s = norm_series_from(traj, p, a);
  SmoothingSeries out;
  out.beta = 1.0 + static_cast<double>(traj.params.N) / 4.0;

  std::size_t i0 = s.times.size();
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (s.times[i] >= t0 - 1e-12 * std::max(1.0, t0)) {
      i0 = i;
      break;
    }
  }
  if (i0 == s.times.size()) throw DomainError("t0 is past the last snapshot");
  out.t0 = s.times[i0];
  out.base = s.normL[i0];

  for (std::size_t i = i0 + 1; i < s.times.size(); ++i) {
    const double dt = s.times[i] - out.t0;
    if (dt <= 0.0) continue;
    if (out.base <= s.floor) {
      // started at the steady state: 0/0 ratios are defined as 0
      out.points.push_back({dt, 0.0});
      continue;
    }
    if (s.normC1[i] <= s.floor) {
      out.truncated = true;
      break;
    }
    out.points.push_back({dt, s.normC1[i] * std::pow(dt, out.beta) / out.base});
  }
  return out;
}

ConsistencyReport rate_consistency(const RateFit& fitL, const RateFit& fitC1) {
  ConsistencyReport r;
  r.difference = std::abs(fitL.slope - fitC1.slope);
  r.tolerance = 3.0 * std::max(fitL.slope_stderr, fitC1.slope_stderr);
  r.pass = r.difference <= r.tolerance;
  return r;
}

}  // namespace kslab
