#include "kgdamp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace kgdamp {

Grid::Grid(int N, double L, double dr, double r_inner)
    : N_(N), L_(L), dr_(dr), r_inner_(r_inner) {
  if (N < 1) throw std::invalid_argument("grid: dimension N must be >= 1");
  if (!(dr > 0.0)) throw std::invalid_argument("grid: dr must be > 0");
  if (!(r_inner >= 0.0)) throw std::invalid_argument("grid: r_inner must be >= 0");
  if (!(r_inner < L)) throw std::invalid_argument("grid: r_inner must be < L");
  whole_line_ = (N == 1 && r_inner == 0.0);

  const double span = whole_line_ ? 2.0 * L : L - r_inner;
  const double cells = span / dr;
  const long n_cells = std::lround(cells);
  if (n_cells < 2 || std::abs(cells - n_cells) > 1e-9 * cells)
    throw std::invalid_argument("grid: dr must divide the domain length exactly");
  const std::size_t n = static_cast<std::size_t>(n_cells) + 1;
  const double origin = whole_line_ ? -L : r_inner;

  x_.resize(n);
  for (std::size_t j = 0; j < n; ++j) x_[j] = origin + dr * static_cast<double>(j);
  x_.back() = L;

  const double omega = whole_line_ ? 1.0 : sphere_measure(N);
  auto measure = [&](double a, double b) {
    if (whole_line_) return b - a;
    return omega * (std::pow(b, N) - std::pow(a, N)) / N;
  };
  const double lo = x_.front();
  w_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::max(lo, x_[j] - 0.5 * dr);
    const double b = std::min(L, x_[j] + 0.5 * dr);
    w_[j] = measure(a, b);
  }
  c_.resize(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double rm = whole_line_ ? 1.0 : std::pow(0.5 * (x_[j] + x_[j + 1]), N - 1);
    c_[j] = omega * rm / dr;
  }
}

double Grid::radius(std::size_t j) const { return std::abs(x_[j]); }

bool Grid::is_dirichlet(std::size_t j) const {
  if (j + 1 == size()) return true;
  return j == 0 && !has_origin();
}

double Grid::sphere_measure(int N) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

double Grid::volume() const {
  if (whole_line_) return 2.0 * L_;
  return sphere_measure(N_) * (std::pow(L_, N_) - std::pow(r_inner_, N_)) / N_;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << "N=" << N_ << (whole_line_ ? " whole-line [-L,L]" : " radial")
     << " L=" << L_ << " dr=" << dr_ << " r_inner=" << r_inner_
     << " nodes=" << size();
  return os.str();
}

void check_size(const Grid& g, std::span<const double> v, const char* what) {
  if (v.size() != g.size()) {
    std::ostringstream os;
    os << what << ": size mismatch (" << v.size() << " values for " << g.size()
       << " nodes)";
    throw std::invalid_argument(os.str());
  }
}

std::vector<double> laplacian(const Grid& grid, std::span<const double> u) {
  check_size(grid, u, "laplacian");
  const auto c = grid.edge_coeffs();
  const auto w = grid.weights();
  const std::size_t n = grid.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = grid.first_free(); j <= grid.last_free(); ++j) {
    double flux = c[j] * (u[j + 1] - u[j]);
    if (j > 0) flux -= c[j - 1] * (u[j] - u[j - 1]);
    out[j] = flux / w[j];
  }
  return out;
}

double integrate(const Grid& grid, std::span<const double> values) {
  check_size(grid, values, "integrate");
  const auto w = grid.weights();
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += w[j] * values[j];
  return s;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> gradient_radial(const Grid& grid, std::span<const double> u) {
  check_size(grid, u, "gradient_radial");
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  std::vector<double> d(n);
  for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (u[j + 1] - u[j - 1]) / (2 * h);
  d[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h);
  d[n - 1] = (3 * u[n - 1] - 4 * u[n - 2] + u[n - 3]) / (2 * h);
  return d;
}

double gradient_pairing(const Grid& grid, std::span<const double> u,
                        std::span<const double> v) {
  check_size(grid, u, "gradient_pairing");
  check_size(grid, v, "gradient_pairing");
  const auto c = grid.edge_coeffs();
  double s = 0.0;
  for (std::size_t e = 0; e < c.size(); ++e)
    s += c[e] * (u[e + 1] - u[e]) * (v[e + 1] - v[e]);
  return s;
}

double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstep_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double t = s * (1.0 - s);
  return 30.0 * t * t;
}

DamperShape damper_shape_from_string(const std::string& s) {
  if (s == "sharp") return DamperShape::sharp;
  if (s == "smoothstep") return DamperShape::smoothstep;
  if (s == "uniform") return DamperShape::uniform;
  throw std::invalid_argument("unknown damper shape '" + s +
                              "' (expected sharp|smoothstep|uniform)");
}

const char* to_string(DamperShape s) {
  switch (s) {
    case DamperShape::sharp: return "sharp";
    case DamperShape::smoothstep: return "smoothstep";
    case DamperShape::uniform: return "uniform";
  }
  return "?";
}

DamperProfile::DamperProfile(const Grid& grid, double M, double R, double a0,
                             DamperShape shape, double width)
    : M_(M), R_(R), a0_(a0), width_(width), shape_(shape) {
  if (!(a0 >= 0.0)) throw std::invalid_argument("damper: a0 must be >= 0");
  if (!(M >= a0)) throw std::invalid_argument("damper: need a0 <= M");
  if (!(R >= 0.0)) throw std::invalid_argument("damper: R must be >= 0");
  if (shape == DamperShape::smoothstep && !(width > 0.0))
    throw std::invalid_argument("damper: smoothstep width must be > 0");
  a_.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid.radius(j);
    switch (shape) {
      case DamperShape::sharp: a_[j] = r > R ? a0 : 0.0; break;
      case DamperShape::smoothstep: a_[j] = a0 * smoothstep((r - R) / width); break;
      case DamperShape::uniform: a_[j] = a0; break;
    }
  }
}

DamperProfile DamperProfile::zero(const Grid& grid) {
  return DamperProfile(grid, 0.0, 0.0, 0.0, DamperShape::uniform, 1.0);
}

bool DamperProfile::identically_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](double a) { return a == 0.0; });
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  std::vector<double> cp(n);
  double denom = diag[0];
  if (denom == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
  cp[0] = n > 1 ? upper[0] / denom : 0.0;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - lower[i] * cp[i - 1];
    if (denom == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
    cp[i] = i + 1 < n ? upper[i] / denom : 0.0;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
}

Eigenpair first_dirichlet_eigenpair(const Grid& grid, double tol) {
  // Generalized problem K u = mu W u on the free nodes, K the SPD stiffness.
  const std::size_t lo = grid.first_free();
  const std::size_t hi = grid.last_free();
  const std::size_t m = hi - lo + 1;
  const auto c = grid.edge_coeffs();
  const auto w = grid.weights();
  std::vector<double> lower(m), diag(m), upper(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = lo + i;
    diag[i] = c[j] + (j > 0 ? c[j - 1] : 0.0);
    lower[i] = j > 0 ? -c[j - 1] : 0.0;
    upper[i] = -c[j];
  }
  std::vector<double> x(m, 1.0), y(m);
  for (int it = 0; it < 10000; ++it) {
    for (std::size_t i = 0; i < m; ++i) y[i] = w[lo + i] * x[i];
    solve_tridiagonal(lower, diag, upper, y);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm2 += w[lo + i] * y[i] * y[i];
    const double norm = std::sqrt(norm2);
    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double xn = y[i] / norm;
      diff = std::max(diff, std::abs(xn - x[i]));
      x[i] = xn;
    }
    if (it > 0 && diff < tol) break;
  }
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) v[lo + i] = x[i];
  const double num = gradient_energy(grid, v);
  double den = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) den += w[j] * v[j] * v[j];
  const double mu = num / den;
  double s = 0.0;
  for (double a : v) s += a;
  if (s < 0) for (double& a : v) a = -a;
  return {mu, std::move(v)};
}

}  // namespace kgdamp
