#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgdamp/grid.hpp"
#include "kgdamp/stepper.hpp"
#include "kgdamp/nonlinearity.hpp"

namespace kgdamp {

/// Radial ground state of -lap Q + c Q = f'(Q).
struct GroundState {
  double c = 1.0;
  double Q0 = 0.0;
  /// J^c(Q) = int |grad Q|^2 + c Q^2 - 2 F(Q), from the fine ODE solution.
  double m = 0.0;
  /// K^c(Q) = int |grad Q|^2 + c Q^2 - Q f'(Q), from the fine ODE solution.
  double K = 0.0;
  /// max |-lap_h Q + c Q - f'(Q)| over free grid nodes.
  double residual = 0.0;
  /// Radius where the shooting solution was joined to its decaying tail.
  double r_join = 0.0;
  int bisection_steps = 0;
  /// Samples of Q on the grid (for N = 1 whole-line grids: Q(|x|)).
  std::vector<double> profile;
  /// Fine radial samples (r, Q) from the ODE integration.
  std::vector<double> fine_r;
  std::vector<double> fine_Q;
};

class ShootingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bisection on Q(0) between shots that cross zero and shots that turn back
/// up, integrating Q'' + (N-1)/r Q' = cQ - f'(Q) with classical RK4 at step
/// dr/4. The model's sign is ignored (f' enters as the focusing source).
GroundState shoot_ground_state(const NonlinearityModel& model, double c,
                               const Grid& grid);

/// Smallest positive zero of c z^2 - 2 f(z) (bisection); Q(0) lies above it.
double turning_point(const NonlinearityModel& model, double c);

enum class WellLabel { Kplus, Kminus, above_threshold };
const char* to_string(WellLabel l);

struct Classification {
  WellLabel label;
  double E_value;
  double K_value;
  double m_used;
};

/// Focusing potential-well classification of data (u0, v0) below level m.
Classification classify(std::span<const double> u0, std::span<const double> v0,
                        const Grid& grid, const NonlinearityModel& model, double m);

struct ProbeOptions {
  double c = 1.0;
  SchemeConfig scheme;
  double T_final = 100.0;
  int sample_stride = 10;
  /// Decay fit window; defaults to [0.1 T_final, T_final].
  double fit_t1 = -1.0;
  double fit_t2 = -1.0;
};

struct ProbeEntry {
  double kappa;
  Classification classification;
  bool blowup;
  double blowup_time;
  double E0;
  double E_final;
  /// Fitted decay rate for global runs with a nonzero damper.
  std::optional<double> gamma_fit;
  /// Kminus blew up, or Kplus stayed global.
  bool consistent;
};

/// Runs (kappa Q, 0) for each kappa and compares the outcome with classify().
std::vector<ProbeEntry> dichotomy_probe(const NonlinearityModel& model, const Grid& grid,
                                        const DamperProfile& damper,
                                        std::span<const double> kappas,
                                        const ProbeOptions& opts = {});

}  // namespace kgdamp
