#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kgdamp {

/// Uniform 1D grid carrying either the whole line [-L, L] (N = 1 without an
/// obstacle) or the radial coordinate r in [r_inner, L] of a radially
/// symmetric problem in N dimensions.
///
/// Quadrature weights are the exact measures of the dual cells
/// [r_j - dr/2, r_j + dr/2] clipped to the domain, so sum(w) is the exact
/// volume. The Laplacian is the flux form
///     (lap u)_j = (c_{j+1/2}(u_{j+1}-u_j) - c_{j-1/2}(u_j-u_{j-1})) / w_j
/// with c_{j+1/2} = |S^{N-1}| r_{j+1/2}^{N-1} / dr, which makes
///     sum_j w_j u_j (lap v)_j = -sum_e c_e (du)_e (dv)_e
/// hold exactly for Dirichlet data.
class Grid {
 public:
  Grid(int N, double L, double dr, double r_inner = 0.0);

  int dimension() const { return N_; }
  double outer_radius() const { return L_; }
  double inner_radius() const { return r_inner_; }
  double spacing() const { return dr_; }
  bool whole_line() const { return whole_line_; }
  /// Regular origin node (radial, no obstacle, N >= 2).
  bool has_origin() const { return !whole_line_ && r_inner_ == 0.0; }
  std::size_t size() const { return x_.size(); }

  /// Signed coordinate (equals r in radial mode).
  std::span<const double> coords() const { return x_; }
  double coord(std::size_t j) const { return x_[j]; }
  double radius(std::size_t j) const;
  std::span<const double> weights() const { return w_; }
  /// Edge coefficients c_{j+1/2}, size() - 1 entries.
  std::span<const double> edge_coeffs() const { return c_; }

  bool is_dirichlet(std::size_t j) const;
  std::size_t first_free() const { return has_origin() ? 0 : 1; }
  std::size_t last_free() const { return size() - 2; }

  /// Surface measure of the unit sphere S^{N-1} (2 for N = 1).
  static double sphere_measure(int N);
  /// Volume of the computational domain.
  double volume() const;

  std::string describe() const;

 private:
  int N_;
  double L_;
  double dr_;
  double r_inner_;
  bool whole_line_;
  std::vector<double> x_;
  std::vector<double> w_;
  std::vector<double> c_;
};

void check_size(const Grid& g, std::span<const double> v, const char* what);

std::vector<double> laplacian(const Grid& grid, std::span<const double> u);
double integrate(const Grid& grid, std::span<const double> values);
double max_abs(std::span<const double> v);
/// Nodal centered differences, second-order one-sided at the ends.
std::vector<double> gradient_radial(const Grid& grid, std::span<const double> u);
/// sum_e c_e (u_{e+1} - u_e)(v_{e+1} - v_e), the discrete integral of grad u . grad v.
double gradient_pairing(const Grid& grid, std::span<const double> u,
                        std::span<const double> v);
inline double gradient_energy(const Grid& grid, std::span<const double> u) {
  return gradient_pairing(grid, u, u);
}

enum class DamperShape { sharp, smoothstep, uniform };
DamperShape damper_shape_from_string(const std::string& s);
const char* to_string(DamperShape s);

/// a(x) with 0 <= a <= M and a >= a0 beyond R + width.
class DamperProfile {
 public:
  DamperProfile(const Grid& grid, double M, double R, double a0,
                DamperShape shape = DamperShape::smoothstep, double width = 1.0);
  static DamperProfile zero(const Grid& grid);

  std::span<const double> values() const { return a_; }
  double operator[](std::size_t j) const { return a_[j]; }
  double M() const { return M_; }
  double R() const { return R_; }
  double a0() const { return a0_; }
  double width() const { return width_; }
  DamperShape shape() const { return shape_; }
  bool identically_zero() const;

 private:
  std::vector<double> a_;
  double M_, R_, a0_, width_;
  DamperShape shape_;
};

/// Quintic smoothstep: 0 for s <= 0, 1 for s >= 1.
double smoothstep(double s);
double smoothstep_derivative(double s);

/// Lowest Dirichlet eigenpair of -lap on the grid (inverse iteration);
/// eigenvector normalized to unit weighted L2 norm and positive.
struct Eigenpair {
  double value;
  std::vector<double> vector;
};
Eigenpair first_dirichlet_eigenpair(const Grid& grid, double tol = 1e-14);

struct Field {
  std::vector<double> u;
  std::vector<double> v;
  double t = 0.0;
};

/// Solves a tridiagonal system in place (Thomas algorithm). lower[0] and
/// upper[n-1] are ignored; rhs receives the solution.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

}  // namespace kgdamp
