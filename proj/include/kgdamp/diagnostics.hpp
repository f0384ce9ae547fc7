#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgdamp/grid.hpp"
#include "kgdamp/nonlinearity.hpp"

namespace kgdamp {

/// One sample of a run. The CSV columns are t..ws_lhs; the remaining members
/// are instantaneous spatial integrals kept for post-processing.
struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;       // discrete energy E^{n+1/2}
  double E_F = 0.0;     // its free part
  double A_cum = 0.0;   // exact cumulative decrement
  double K = 0.0;
  double J = 0.0;
  double pair_vu = 0.0;
  double max_u = 0.0;
  double l2_u = 0.0;
  double mor_grad = 0.0;  // cumulative cone integrals from S_cone
  double mor_g = 0.0;
  double mor_damp = 0.0;
  double ws_lhs = 0.0;

  double damp_rate = 0.0;   // int a v^2
  double kinetic = 0.0;     // int v^2
  double cone_grad = 0.0;   // int_{|x|<t} |x v + t u_x|^2 / lambda^3
  double cone_g = 0.0;      // int_{|x|<t} g(u) q
  double cone_damp = 0.0;   // int_{|x|<t} a v m(u)
  double cone_ws = 0.0;     // int_{|x|<t} |u|^p / t
  double pair_chi = 0.0;    // <v | chi u>
  double rhs_chi = 0.0;     // right side of d/dt <v | chi u>
  double pair_full = 0.0;   // <v | u> + <a u | u> / 2
  double rhs_full = 0.0;    // ||v||^2 - K(u)
};

struct DiagnosticsOptions {
  double S_cone = 1.0;
  double p_sobolev = 0.0;  // 0 -> 2 + 4/N
  double chi_R = 1.0;
  /// Cone membership: |x_j| < t - cone_margin * dr.
  double cone_margin = 0.5;
};

struct Snapshot {
  double t;
  std::vector<double> u;
  std::vector<double> v;
};

struct RunHistory {
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
  bool blowup = false;
  double blowup_time = 0.0;
  std::string blowup_message;
  std::vector<std::string> warnings;

  int N = 1;
  Sign sign = Sign::defocusing;
  double dt = 0.0;
  int sample_stride = 1;
  DiagnosticsOptions options;

  double E0() const { return records.empty() ? 0.0 : records.front().E; }
  double E_final() const { return records.empty() ? 0.0 : records.back().E; }
  double t_final() const { return records.empty() ? 0.0 : records.back().t; }
};

// Field functionals; v is the nodal velocity.
double total_energy(const Field& field, const Grid& grid, const NonlinearityModel& model);
double free_energy(const Field& field, const Grid& grid);
/// int |grad u|^2 + u^2 +- u f'(u), + for defocusing.
double virial_K(std::span<const double> u, const Grid& grid, const NonlinearityModel& model);
/// int |grad u|^2 + u^2 +- 2 f(u); the focusing value is J(u).
double static_J(std::span<const double> u, const Grid& grid, const NonlinearityModel& model);

/// Morawetz weights at (t, x) in dimension N.
struct MorawetzWeights {
  static double lambda(double t, double r);
  static double q(int N, double t, double r);
  /// (-t u_t + x u_x) / lambda + u q.
  static double multiplier(int N, double t, double x, double u, double ut, double ux);
};

struct ConeIntegrands {
  double grad = 0.0, g = 0.0, damp = 0.0, ws = 0.0;
};
ConeIntegrands cone_integrands(const Grid& grid, const DamperProfile& damper,
                               const NonlinearityModel& model, double t,
                               std::span<const double> u, std::span<const double> v,
                               double p, double cone_margin = 0.5);

/// Builds the state-only part of a record at time t (no E, E_F, A_cum, and
/// no cumulative cone columns).
DiagnosticsRecord sample_record(const Grid& grid, const DamperProfile& damper,
                                const NonlinearityModel& model, double t,
                                std::span<const double> u, std::span<const double> v,
                                const DiagnosticsOptions& opts);

/// Fills mor_grad, mor_g, mor_damp and ws_lhs as time-trapezoid integrals of
/// the instantaneous cone terms from S_cone up to each record.
void fill_cumulative_cone(RunHistory& history);

/// Time-trapezoid of a sampled series over [S, T] (partial end intervals are
/// linearly interpolated).
double trapezoid_window(std::span<const double> t, std::span<const double> y,
                        double S, double T);

/// Exact decrement A(T) recorded by the stepper, linear between samples.
double decrement(const RunHistory& history, double T);
/// Time-trapezoid of int a v^2 over [0, T]; agrees with decrement() to O(dt).
double decrement_quadrature(const RunHistory& history, double T);

/// [M T + (a0 R)^{-1}] A / E0.
double mu_ratio(double A, double E0, double M, double T, double a0, double R);

struct MorawetzTerms {
  double grad = 0.0, g = 0.0, damp = 0.0;
};
MorawetzTerms morawetz_accumulate(const RunHistory& history, double S, double T);

/// LHS / (E0^{p/2-1} (E0 + term_grad)), LHS = int_S^T int_{|x|<t} |u|^p / t.
double weighted_sobolev_ratio(const RunHistory& history, double S, double T,
                              double p, double E0);

/// Valid exponent range [2 + 4/N, 2N/(N-2)] (upper end infinite for N <= 2).
std::pair<double, double> sobolev_range(int N);

struct EquipartitionSample {
  double t;
  double residual_chi;   // d/dt <v|chi u> - rhs_chi
  double residual_full;  // d/dt (<v|u> + <au|u>/2) - (||v||^2 - K)
};
std::vector<EquipartitionSample> equipartition_residual(const RunHistory& history);

/// Quintic cutoff, 1 on r < R and 0 on r > 2R.
double cutoff_chi(double r, double R);
double cutoff_chi_derivative(double r, double R);

}  // namespace kgdamp
