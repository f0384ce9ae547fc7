#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgdamp/grid.hpp"
#include "kgdamp/nonlinearity.hpp"

namespace kgdamp {

enum class Scheme { conservative, leapfrog_explicit };
Scheme scheme_from_string(const std::string& s);
const char* to_string(Scheme s);

struct SchemeConfig {
  double dt = 0.01;
  Scheme scheme = Scheme::conservative;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  /// Below this |u+ - u-| the difference quotient falls back to f'(midpoint).
  double sv_epsilon = 1e-10;
  double blowup_threshold = 1e6;
  /// Test hook: when false the nonlinear term is always f'(midpoint), which
  /// breaks the discrete energy identity.
  bool use_difference_quotient = true;
};

/// Throws std::invalid_argument naming the violated rule.
void validate(const SchemeConfig& scheme, const Grid& grid);

class NewtonDivergence : public std::runtime_error {
 public:
  NewtonDivergence(const std::string& what, std::size_t node, double residual)
      : std::runtime_error(what), node_(node), residual_(residual) {}
  std::size_t node() const { return node_; }
  double residual() const { return residual_; }

 private:
  std::size_t node_;
  double residual_;
};

class BlowupDetected : public std::runtime_error {
 public:
  BlowupDetected(const std::string& what, double time, double max_u)
      : std::runtime_error(what), time_(time), max_u_(max_u) {}
  double time() const { return time_; }
  double max_u() const { return max_u_; }

 private:
  double time_;
  double max_u_;
};

/// Two consecutive time levels u^n (u_prev) and u^{n+1} (u_curr), plus the
/// level before them once a step has been taken.
struct StepState {
  std::vector<double> u_back;
  std::vector<double> u_prev;
  std::vector<double> u_curr;
  long level = 1;  // index of u_curr
  double dt = 0.0;
  /// Cumulative damping decrement sum_k dt * int a vbar_k^2.
  double A = 0.0;
  /// Decrement added by the latest step.
  double last_increment = 0.0;
  int last_newton_iters = 0;

  double time() const { return dt * static_cast<double>(level); }
  /// Time of u_prev.
  double prev_time() const { return dt * static_cast<double>(level - 1); }
};

/// Time integrator for u_tt + a u_t - lap u + u +- f'(u) = 0 (sign + for the
/// defocusing model).
///
/// The conservative scheme
///   (u+ - 2u + u-)/dt^2 + a (u+ - u-)/(2dt) - lap (u+ + u-)/2 + (u+ + u-)/2
///       +- (f(u+) - f(u-))/(u+ - u-) = 0
/// satisfies E^{n+1/2} - E^{n-1/2} = -2 dt int a ((u+ - u-)/(2dt))^2 exactly
/// for discrete_energy(). The implicit system is solved by Newton's method
/// with a tridiagonal Jacobian.
class Stepper {
 public:
  Stepper(const Grid& grid, const DamperProfile& damper,
          const NonlinearityModel& model, SchemeConfig scheme);

  /// u^1 = u^0 + dt v0 + dt^2/2 (lap u^0 - u^0 -+ f'(u^0) - a v0).
  StepState start(std::span<const double> u0, std::span<const double> v0) const;
  /// Starts from two given levels (used for time reversal).
  StepState start_from_levels(std::span<const double> u_prev,
                              std::span<const double> u_curr) const;

  void step(StepState& state);

  /// E^{n+1/2} built from u_prev and u_curr.
  double discrete_energy(const StepState& state) const;
  double discrete_energy(std::span<const double> u0, std::span<const double> u1) const;
  /// Free part of discrete_energy (no nonlinear term).
  double discrete_free_energy(std::span<const double> u0,
                              std::span<const double> u1) const;

  /// (u_curr - u_back) / (2 dt), the velocity at u_prev.
  std::vector<double> centered_velocity(const StepState& state) const;

  const Grid& grid() const { return grid_; }
  const DamperProfile& damper() const { return damper_; }
  const NonlinearityModel& model() const { return model_; }
  const SchemeConfig& scheme() const { return scheme_; }

 private:
  void solve_conservative(const std::vector<double>& u0,
                          const std::vector<double>& um, std::vector<double>& up,
                          double t_next, int& iters);
  void explicit_leapfrog(const std::vector<double>& u0,
                         const std::vector<double>& um, std::vector<double>& up) const;
  double quotient(double up, double um) const;
  double quotient_derivative(double up, double um) const;
  bool growth_indicates_blowup() const;

  const Grid& grid_;
  const DamperProfile& damper_;
  const NonlinearityModel& model_;
  SchemeConfig scheme_;
  double s_;  // +1 defocusing, -1 focusing
  std::vector<double> lap_diag_, lap_lower_, lap_upper_;
  std::vector<double> res_, lo_, di_, up_;
  std::deque<double> recent_max_;
};

}  // namespace kgdamp
