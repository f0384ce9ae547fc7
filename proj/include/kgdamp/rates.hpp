#pragma once

#include <optional>
#include <string>

#include "kgdamp/diagnostics.hpp"

namespace kgdamp {

enum class Regime { condition_f, condition_f2, focusing };
Regime regime_from_string(const std::string& s);
const char* to_string(Regime r);

/// Constants entering the closed-form decay rate. Fields a regime does not
/// use may stay empty.
struct RateInputs {
  Regime regime = Regime::condition_f;
  double M = 1.0;
  double R = 1.0;
  double a0 = 1.0;
  double C0 = 0.0;
  double C_star = 1.0;
  int N = 1;
  std::optional<double> q_growth;
  std::optional<double> E0;
  std::optional<double> nu;
  std::optional<double> C_script_N;
  std::optional<double> epsilon;
};

struct TheoreticalRate {
  double T;
  double delta;
  double gamma;
};

/// log T per regime, delta from the damper constants, gamma = log(1+delta)/T.
TheoreticalRate theoretical_rate(const RateInputs& in);

struct RateFit {
  double gamma_fit = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  double t1 = 0.0;
  double t2 = 0.0;
  int samples = 0;
};

/// Least-squares line through (t, log E) on records with t in [t1, t2].
RateFit fit_decay_rate(const RunHistory& history, double t1, double t2);
RateFit fit_decay_rate(std::span<const double> t, std::span<const double> E,
                       double t1, double t2);

/// A(T) >= delta E(T), with A and E measured from the start of the history.
bool decrement_gate(const RunHistory& history, double T, double delta);
/// Same test on the window [S, S + T]: A(S+T) - A(S) >= delta E(S+T).
bool decrement_gate_window(const RunHistory& history, double S, double T,
                           double delta);

}  // namespace kgdamp
