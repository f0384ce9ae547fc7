#pragma once

// Reference values computed independently of the library: closed forms and
// plain composite quadrature on analytic integrands.

#include <cmath>
#include <functional>

namespace oracle {

inline double sech(double x) { return 1.0 / std::cosh(x); }

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Whole-line integrals of the 1D soliton Q = sech.
inline constexpr double kIntSech2 = 2.0;             // int sech^2
inline constexpr double kIntSech4 = 4.0 / 3.0;       // int sech^4
inline constexpr double kIntSechPrime2 = 2.0 / 3.0;  // int (sech')^2

/// J(kappa Q) for f = u^4/2: kappa^2 (8/3) - kappa^4 (4/3).
inline double J_scaled(double kappa) {
  const double k2 = kappa * kappa;
  return k2 * (kIntSechPrime2 + kIntSech2) - k2 * k2 * kIntSech4;
}

/// K(kappa Q) for f = u^4/2: (8/3) kappa^2 (1 - kappa^2).
inline double K_scaled(double kappa) {
  const double k2 = kappa * kappa;
  return (8.0 / 3.0) * k2 * (1.0 - k2);
}

inline double ball_volume(int N, double L) {
  return std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N + 1.0) * std::pow(L, N);
}

}  // namespace oracle
