#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kgdamp/nonlinearity.hpp"

namespace kgdamp {

struct TruncationOptions {
  int points_per_decade = 2048;
  /// Upper end of the first-stage table as a multiple of k, used when no
  /// second stage is present.
  double table_extent = 1e4;
  double quad_tol = 1e-13;
};

/// Growth-limited approximation of a defocusing potential.
///
/// With V(z) = f(z)/z^2 the first stage keeps V on |z| <= k and caps the
/// growth beyond it,
///     z V_k'(z) = min(z V'(z), k V'(k) |z/k|^theta),
/// and the optional second stage replaces V_k beyond l > k by a pure power,
///     z V_kl'(z) = l V_k'(l) |z/l|^theta.
/// V_k on (k, z_end] comes from adaptive quadrature of V_k' stored on a
/// log-spaced table and is evaluated by monotone cubic Hermite interpolation.
/// f_k(z) = V_k(z) z^2 is even.
class TruncatedModel {
 public:
  TruncatedModel(NonlinearityModel base, double theta, double k,
                 std::optional<double> l = std::nullopt,
                 TruncationOptions opts = {});

  double f(double z) const;
  double fprime(double z) const;
  double fsecond(double z) const;
  double g(double z) const { return z * fprime(z) - 2.0 * f(z); }

  double V(double z) const;
  double Vprime(double z) const;

  double theta() const { return theta_; }
  double k() const { return k_; }
  std::optional<double> l() const { return l_; }
  const NonlinearityModel& base() const { return base_; }

  /// True when the base already obeys the capped growth beyond k, in which
  /// case f_k = f.
  bool is_identity() const { return identity_; }

  struct TableRow {
    double z, Vprime, V, f, fprime;
  };
  const std::vector<TableRow>& table() const { return table_; }

  /// Wraps this truncation as a custom NonlinearityModel sharing the table.
  NonlinearityModel as_model() const;

 private:
  double base_zVprime(double z) const;  // z V'(z) = g(z) / z^2, +inf on overflow
  double stage1_Vprime(double z) const;  // z > k
  double stage1_V(double z) const;       // z > k, tabulated

  NonlinearityModel base_;
  double theta_;
  double k_;
  std::optional<double> l_;
  double cap_;  // k V'(k)
  bool identity_ = false;
  double z_end_ = 0.0;
  double log_dz_ = 0.0;
  std::vector<TableRow> table_;
  // second stage constants
  double Vk_l_ = 0.0;
  double cap_l_ = 0.0;  // l V_k'(l)
};

/// First-stage construction; requires a defocusing base, theta in (0,1), k > 0.
TruncatedModel truncate_first(const NonlinearityModel& base, double theta,
                              double k, TruncationOptions opts = {});

/// Adds the second stage at l > k to a first-stage model.
TruncatedModel truncate_second(const TruncatedModel& first, double l,
                               TruncationOptions opts = {});

/// sup |f'(z1) - f'(z2)| / ((|z1| + |z2|)^theta |z1 - z2|) over pairs of n
/// uniform samples on [-zmax, zmax].
double lipschitz_ratio(const TruncatedModel& model, double zmax, int n);

/// Largest theta allowed in dimension N (2 + theta below 2N/(N-2)).
double max_theta(int N);

}  // namespace kgdamp
