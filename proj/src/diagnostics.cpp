#include "kgdamp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kgdamp {

namespace {

double weighted_sum(const Grid& grid, std::span<const double> a,
                    std::span<const double> b) {
  const auto w = grid.weights();
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += w[j] * a[j] * b[j];
  return s;
}

double nonlinear_integral(const Grid& grid, std::span<const double> u,
                          const NonlinearityModel& model, bool with_u_fprime) {
  if (model.kind() == NonlinearityModel::Kind::none) return 0.0;
  const auto w = grid.weights();
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j)
    s += w[j] * (with_u_fprime ? u[j] * model.fprime(u[j]) : model.f(u[j]));
  return s;
}

void check_window(const RunHistory& h, double S, double T) {
  if (h.records.empty()) throw std::out_of_range("empty history");
  const double t0 = h.records.front().t;
  const double t1 = h.records.back().t;
  const double slack = 1e-9 * (1.0 + std::abs(t1));
  if (!(S < T) || S < t0 - slack || T > t1 + slack) {
    std::ostringstream os;
    os << "window [" << S << ", " << T << "] out of range of history [" << t0
       << ", " << t1 << "]";
    throw std::out_of_range(os.str());
  }
}

template <class Get>
double integrate_records(const RunHistory& h, double S, double T, Get get) {
  std::vector<double> t, y;
  t.reserve(h.records.size());
  y.reserve(h.records.size());
  for (const auto& r : h.records) {
    t.push_back(r.t);
    y.push_back(get(r));
  }
  return trapezoid_window(t, y, S, T);
}

}  // namespace

double total_energy(const Field& field, const Grid& grid, const NonlinearityModel& model) {
  return free_energy(field, grid) +
         2.0 * model.sign_factor() * nonlinear_integral(grid, field.u, model, false);
}

double free_energy(const Field& field, const Grid& grid) {
  check_size(grid, field.u, "free_energy");
  check_size(grid, field.v, "free_energy");
  return weighted_sum(grid, field.v, field.v) + gradient_energy(grid, field.u) +
         weighted_sum(grid, field.u, field.u);
}

double virial_K(std::span<const double> u, const Grid& grid, const NonlinearityModel& model) {
  check_size(grid, u, "virial_K");
  return gradient_energy(grid, u) + weighted_sum(grid, u, u) +
         model.sign_factor() * nonlinear_integral(grid, u, model, true);
}

double static_J(std::span<const double> u, const Grid& grid, const NonlinearityModel& model) {
  check_size(grid, u, "static_J");
  return gradient_energy(grid, u) + weighted_sum(grid, u, u) +
         2.0 * model.sign_factor() * nonlinear_integral(grid, u, model, false);
}

double MorawetzWeights::lambda(double t, double r) { return std::hypot(t, r); }

double MorawetzWeights::q(int N, double t, double r) {
  const double lam = lambda(t, r);
  return (N - 1) / (2.0 * lam) + (t * t - r * r) / (lam * lam * lam);
}

double MorawetzWeights::multiplier(int N, double t, double x, double u, double ut,
                                   double ux) {
  const double r = std::abs(x);
  const double lam = lambda(t, r);
  return (-t * ut + x * ux) / lam + u * q(N, t, r);
}

ConeIntegrands cone_integrands(const Grid& grid, const DamperProfile& damper,
                               const NonlinearityModel& model, double t,
                               std::span<const double> u, std::span<const double> v,
                               double p, double cone_margin) {
  check_size(grid, u, "cone_integrands");
  check_size(grid, v, "cone_integrands");
  ConeIntegrands out;
  if (t <= 0.0) return out;
  const auto ux = gradient_radial(grid, u);
  const auto w = grid.weights();
  const auto a = damper.values();
  const int N = grid.dimension();
  const double edge = t - cone_margin * grid.spacing();
  const bool has_g = model.kind() != NonlinearityModel::Kind::none;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x = grid.coord(j);
    const double r = std::abs(x);
    if (!(r < edge)) continue;
    const double lam = MorawetzWeights::lambda(t, r);
    const double qq = MorawetzWeights::q(N, t, r);
    const double k = x * v[j] + t * ux[j];
    out.grad += w[j] * k * k / (lam * lam * lam);
    if (has_g) out.g += w[j] * model.g(u[j]) * qq;
    if (a[j] != 0.0)
      out.damp += w[j] * a[j] * v[j] *
                  MorawetzWeights::multiplier(N, t, x, u[j], v[j], ux[j]);
    out.ws += w[j] * std::pow(std::abs(u[j]), p) / t;
  }
  return out;
}

double cutoff_chi(double r, double R) { return 1.0 - smoothstep((r - R) / R); }

double cutoff_chi_derivative(double r, double R) {
  return -smoothstep_derivative((r - R) / R) / R;
}

DiagnosticsRecord sample_record(const Grid& grid, const DamperProfile& damper,
                                const NonlinearityModel& model, double t,
                                std::span<const double> u, std::span<const double> v,
                                const DiagnosticsOptions& opts) {
  check_size(grid, u, "sample_record");
  check_size(grid, v, "sample_record");
  DiagnosticsRecord rec;
  rec.t = t;
  const double s = model.sign_factor();
  const auto w = grid.weights();
  const auto a = damper.values();
  const double G = gradient_energy(grid, u);
  const double uu = weighted_sum(grid, u, u);
  const double ufp = nonlinear_integral(grid, u, model, true);
  const double F = nonlinear_integral(grid, u, model, false);
  rec.kinetic = weighted_sum(grid, v, v);
  rec.K = G + uu + s * ufp;
  rec.J = G + uu + 2.0 * s * F;
  rec.pair_vu = weighted_sum(grid, v, u);
  rec.max_u = max_abs(u);
  rec.l2_u = std::sqrt(uu);

  double damp = 0.0, au = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    damp += w[j] * a[j] * v[j] * v[j];
    au += w[j] * a[j] * u[j] * u[j];
  }
  rec.damp_rate = damp;
  rec.pair_full = rec.pair_vu + 0.5 * au;
  rec.rhs_full = rec.kinetic - rec.K;

  const auto ux = gradient_radial(grid, u);
  const double R = opts.chi_R;
  double pc = 0.0, rhs = 0.0;
  const bool has_nl = model.kind() != NonlinearityModel::Kind::none;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x = grid.coord(j);
    const double r = std::abs(x);
    const double chi = cutoff_chi(r, R);
    const double dchi = cutoff_chi_derivative(r, R) * (x < 0 ? -1.0 : 1.0);
    pc += w[j] * v[j] * chi * u[j];
    const double nl = has_nl ? s * u[j] * model.fprime(u[j]) : 0.0;
    rhs += w[j] * (chi * (v[j] * v[j] - ux[j] * ux[j] - u[j] * u[j] - nl) -
                   (a[j] * v[j] * chi * u[j] + u[j] * ux[j] * dchi));
  }
  rec.pair_chi = pc;
  rec.rhs_chi = rhs;

  const double p = opts.p_sobolev > 0.0 ? opts.p_sobolev : 2.0 + 4.0 / grid.dimension();
  const auto ci = cone_integrands(grid, damper, model, t, u, v, p, opts.cone_margin);
  rec.cone_grad = ci.grad;
  rec.cone_g = ci.g;
  rec.cone_damp = ci.damp;
  rec.cone_ws = ci.ws;
  return rec;
}

double trapezoid_window(std::span<const double> t, std::span<const double> y,
                        double S, double T) {
  if (t.size() != y.size()) throw std::invalid_argument("trapezoid_window: size mismatch");
  if (t.size() < 2 || !(T > S)) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double a = std::max(t[i - 1], S);
    const double b = std::min(t[i], T);
    if (!(b > a)) continue;
    const double h = t[i] - t[i - 1];
    auto lerp = [&](double s) {
      return y[i - 1] + (y[i] - y[i - 1]) * (s - t[i - 1]) / h;
    };
    sum += 0.5 * (b - a) * (lerp(a) + lerp(b));
  }
  return sum;
}

void fill_cumulative_cone(RunHistory& h) {
  const double S = h.options.S_cone;
  auto& rs = h.records;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i == 0) {
      rs[i].mor_grad = rs[i].mor_g = rs[i].mor_damp = rs[i].ws_lhs = 0.0;
      continue;
    }
    const double a = std::max(rs[i - 1].t, S);
    const double b = rs[i].t;
    rs[i].mor_grad = rs[i - 1].mor_grad;
    rs[i].mor_g = rs[i - 1].mor_g;
    rs[i].mor_damp = rs[i - 1].mor_damp;
    rs[i].ws_lhs = rs[i - 1].ws_lhs;
    if (!(b > a)) continue;
    const double h_ = rs[i].t - rs[i - 1].t;
    auto seg = [&](double y0, double y1) {
      const double ya = y0 + (y1 - y0) * (a - rs[i - 1].t) / h_;
      return 0.5 * (b - a) * (ya + y1);
    };
    rs[i].mor_grad += seg(rs[i - 1].cone_grad, rs[i].cone_grad);
    rs[i].mor_g += seg(rs[i - 1].cone_g, rs[i].cone_g);
    rs[i].mor_damp += seg(rs[i - 1].cone_damp, rs[i].cone_damp);
    rs[i].ws_lhs += seg(rs[i - 1].cone_ws, rs[i].cone_ws);
  }
}

double decrement(const RunHistory& h, double T) {
  if (h.records.empty()) throw std::out_of_range("decrement: empty history");
  const auto& rs = h.records;
  const double slack = 1e-9 * (1.0 + std::abs(rs.back().t));
  if (T < rs.front().t - slack || T > rs.back().t + slack) {
    std::ostringstream os;
    os << "decrement: T=" << T << " out of range [" << rs.front().t << ", "
       << rs.back().t << "]";
    throw std::out_of_range(os.str());
  }
  if (T <= rs.front().t) return rs.front().A_cum;
  for (std::size_t i = 1; i < rs.size(); ++i) {
    if (T <= rs[i].t + slack) {
      if (std::abs(T - rs[i].t) <= slack) return rs[i].A_cum;
      const double f = (T - rs[i - 1].t) / (rs[i].t - rs[i - 1].t);
      return rs[i - 1].A_cum + f * (rs[i].A_cum - rs[i - 1].A_cum);
    }
  }
  return rs.back().A_cum;
}

double decrement_quadrature(const RunHistory& h, double T) {
  if (h.records.empty()) throw std::out_of_range("decrement: empty history");
  if (T <= h.records.front().t) return 0.0;
  check_window(h, h.records.front().t, T);
  return integrate_records(h, h.records.front().t, T,
                           [](const DiagnosticsRecord& r) { return r.damp_rate; });
}

double mu_ratio(double A, double E0, double M, double T, double a0, double R) {
  if (!(E0 > 0.0)) throw std::invalid_argument("mu_ratio: E0 must be > 0");
  if (!(a0 > 0.0) || !(R > 0.0)) throw std::invalid_argument("mu_ratio: a0 and R must be > 0");
  return (M * T + 1.0 / (a0 * R)) * A / E0;
}

MorawetzTerms morawetz_accumulate(const RunHistory& h, double S, double T) {
  check_window(h, S, T);
  MorawetzTerms m;
  m.grad = integrate_records(h, S, T, [](const auto& r) { return r.cone_grad; });
  m.g = integrate_records(h, S, T, [](const auto& r) { return r.cone_g; });
  m.damp = integrate_records(h, S, T, [](const auto& r) { return r.cone_damp; });
  return m;
}

std::pair<double, double> sobolev_range(int N) {
  const double lo = 2.0 + 4.0 / N;
  const double hi = N <= 2 ? std::numeric_limits<double>::infinity() : 2.0 * N / (N - 2.0);
  return {lo, hi};
}

double weighted_sobolev_ratio(const RunHistory& h, double S, double T, double p,
                              double E0) {
  const auto [lo, hi] = sobolev_range(h.N);
  if (p < lo - 1e-12) {
    std::ostringstream os;
    os << "p below 2+4/N (p=" << p << ", N=" << h.N << ")";
    throw std::invalid_argument(os.str());
  }
  if (p > hi + 1e-12) {
    std::ostringstream os;
    os << "p above 2N/(N-2) (p=" << p << ", N=" << h.N << ")";
    throw std::invalid_argument(os.str());
  }
  const double recorded =
      h.options.p_sobolev > 0.0 ? h.options.p_sobolev : 2.0 + 4.0 / h.N;
  if (std::abs(recorded - p) > 1e-12 * p) {
    std::ostringstream os;
    os << "history recorded the cone integrand at p=" << recorded << ", not p=" << p;
    throw std::invalid_argument(os.str());
  }
  if (!(E0 > 0.0)) throw std::invalid_argument("weighted_sobolev_ratio: E0 must be > 0");
  check_window(h, S, T);
  const double lhs = integrate_records(h, S, T, [](const auto& r) { return r.cone_ws; });
  const double grad = integrate_records(h, S, T, [](const auto& r) { return r.cone_grad; });
  return lhs / (std::pow(E0, 0.5 * p - 1.0) * (E0 + grad));
}

std::vector<EquipartitionSample> equipartition_residual(const RunHistory& h) {
  std::vector<EquipartitionSample> out;
  const auto& rs = h.records;
  if (rs.size() < 3) return out;
  out.reserve(rs.size() - 2);
  for (std::size_t i = 1; i + 1 < rs.size(); ++i) {
    const double dt = rs[i + 1].t - rs[i - 1].t;
    out.push_back({rs[i].t,
                   (rs[i + 1].pair_chi - rs[i - 1].pair_chi) / dt - rs[i].rhs_chi,
                   (rs[i + 1].pair_full - rs[i - 1].pair_full) / dt - rs[i].rhs_full});
  }
  return out;
}

}  // namespace kgdamp
