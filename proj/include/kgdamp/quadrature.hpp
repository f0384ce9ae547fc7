#pragma once

#include <array>
#include <cmath>
#include <utility>

namespace kgdamp {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
std::pair<double, double> gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

template <class F>
QuadResult adapt(F& f, double a, double b, double tol, int depth) {
  auto [val, err] = gk15(f, a, b);
  if (err <= tol || depth <= 0) return {val, err, err <= tol};
  const double m = 0.5 * (a + b);
  auto left = adapt(f, a, m, 0.5 * tol, depth - 1);
  auto right = adapt(f, m, b, 0.5 * tol, depth - 1);
  return {left.value + right.value, left.error + right.error,
          left.converged && right.converged};
}

}  // namespace detail

/// Recursive bisection with a 7/15 Gauss-Kronrod pair.
template <class F>
QuadResult adaptive_gauss_kronrod(F&& f, double a, double b, double tol,
                                  int max_depth = 40) {
  return detail::adapt(f, a, b, tol, max_depth);
}

}  // namespace kgdamp
