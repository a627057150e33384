#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/profiles.hpp"
#include "kslab/rate.hpp"

namespace kslab {

// All writers are atomic (temp file + rename) and emit doubles via %.17g, so
// a rerun with the same config reproduces the artifacts byte for byte.

void atomic_write(const std::string& path, const std::string& content);

std::string format_double(double v);

void save_profile_csv(const SteadyProfile& p, const std::string& path);

// header: t,normL,normC1,lyapunov,min_ux,sup_ratio
struct SeriesRow {
  double t = 0.0;
  double normL = 0.0;
  double normC1 = 0.0;
  double lyapunov = 0.0;
  double min_ux = 0.0;
  double sup_ratio = 0.0;
};
void save_series_csv(const std::vector<SeriesRow>& rows, const std::string& path);
std::vector<SeriesRow> read_series_csv(const std::string& path);

// header: x,u
void save_snapshot_csv(const GridFn& u, const std::string& path);
GridFn read_snapshot_csv(const std::string& path);

// header: N,a,n,lambda1,gap,iters
struct Lambda1Row {
  int N = 0;
  double a = 0.0;
  std::size_t n = 0;
  double lambda1 = 0.0;
  double gap = 0.0;
  std::size_t iters = 0;
};
void save_lambda1_csv(const std::vector<Lambda1Row>& rows, const std::string& path);

// header: x,phi1
void save_phi1_csv(const GridFn& phi1, const std::string& path);

struct RateFitRecord {
  RateFit fit;
  double lambda1 = 0.0;
  double dUa1 = 0.0;
  double comparator = 0.0;  // lambda_frac * (lambda1 - 1) * dUa1^q
};
void save_ratefit_json(const std::vector<RateFitRecord>& records, const std::string& path);

// Written once at the end of a run. The wall clock lives here and only here;
// the data files above must not depend on it.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // echoed key=value, sorted
  std::vector<std::string> files;
  std::string status;  // completed | supercritical-detected | unstable
  double wall_seconds = 0.0;
};
void save_manifest(const RunManifest& m, const std::string& path);

}  // namespace kslab
