#pragma once

#include <vector>

#include "kgdamp/diagnostics.hpp"
#include "kgdamp/grid.hpp"
#include "kgdamp/nonlinearity.hpp"
#include "kgdamp/stepper.hpp"

namespace kgdamp {

/// Everything a single run needs, already validated and built.
struct Simulation {
  Grid grid;
  DamperProfile damper;
  NonlinearityModel model;
  SchemeConfig scheme;
  std::vector<double> u0;
  std::vector<double> v0;
  double T_final = 0.0;
  int sample_stride = 1;
  int snapshot_stride = 0;  // 0 = no snapshots; counted in samples
  DiagnosticsOptions diagnostics;
};

/// Steps from t = 0 to T_final and samples diagnostics every sample_stride
/// steps. A detected blowup ends the run early with history.blowup set;
/// other solver failures propagate.
RunHistory run(const Simulation& sim);

/// Largest |x| where the initial data is non-negligible.
double support_radius(const Grid& grid, std::span<const double> u0,
                      std::span<const double> v0, double rel_tol = 1e-8);

}  // namespace kgdamp
