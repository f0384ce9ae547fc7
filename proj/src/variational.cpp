#include "kgdamp/variational.hpp"

#include <cmath>
#include <sstream>

#include "kgdamp/diagnostics.hpp"
#include "kgdamp/rates.hpp"
#include "kgdamp/simulation.hpp"

namespace kgdamp {

namespace {

enum class Shot { crossed, turned, reached_end };

struct ShotResult {
  Shot kind;
  std::vector<double> Q;  // samples at r = i h
  std::vector<double> P;
};

ShotResult shoot_once(const NonlinearityModel& model, double c, int N, double Q0,
                      double h, double L) {
  auto rhs = [&](double r, double q, double p) {
    const double src = c * q - model.fprime(q);
    return r == 0.0 ? src / N : src - (N - 1) / r * p;
  };
  ShotResult out;
  const long n_max = static_cast<long>(std::llround(L / h));
  out.Q.reserve(static_cast<std::size_t>(n_max) + 1);
  out.P.reserve(static_cast<std::size_t>(n_max) + 1);
  double q = Q0, p = 0.0;
  out.Q.push_back(q);
  out.P.push_back(p);
  try {
    for (long i = 0; i < n_max; ++i) {
      const double r = i * h;
      const double k1q = p, k1p = rhs(r, q, p);
      const double k2q = p + 0.5 * h * k1p, k2p = rhs(r + 0.5 * h, q + 0.5 * h * k1q, k2q);
      const double k3q = p + 0.5 * h * k2p, k3p = rhs(r + 0.5 * h, q + 0.5 * h * k2q, k3q);
      const double k4q = p + h * k3p, k4p = rhs(r + h, q + h * k3q, k4q);
      q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
      p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
      out.Q.push_back(q);
      out.P.push_back(p);
      if (!std::isfinite(q) || q < 0.0) {
        out.kind = Shot::crossed;
        return out;
      }
      if (p > 0.0) {
        out.kind = Shot::turned;
        return out;
      }
    }
  } catch (const RangeError&) {
    out.kind = Shot::crossed;
    return out;
  }
  out.kind = Shot::reached_end;
  return out;
}

// Composite Simpson on uniform samples y[0..n] (n even) with spacing h.
double simpson(const std::vector<double>& y, std::size_t n, double h) {
  double s = y[0] + y[n];
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
  return s * h / 3.0;
}

}  // namespace

double turning_point(const NonlinearityModel& model, double c) {
  auto h = [&](double z) { return c * z * z - 2.0 * model.f(z); };
  double lo = 1e-6;
  double hi = lo;
  bool found = false;
  for (int i = 0; i < 200; ++i) {
    hi = lo * 1.5;
    double val;
    try {
      val = h(hi);
    } catch (const RangeError&) {
      val = -1.0;
    }
    if (val < 0.0) {
      found = true;
      break;
    }
    lo = hi;
  }
  if (!found) throw ShootingError("bisection bracket not found: c z^2 - 2 f(z) has no positive zero");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    double val;
    try {
      val = h(mid);
    } catch (const RangeError&) {
      val = -1.0;
    }
    (val < 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

GroundState shoot_ground_state(const NonlinearityModel& model, double c,
                               const Grid& grid) {
  if (!(c > 0.0)) throw std::invalid_argument("shoot_ground_state: c must be > 0");
  if (grid.inner_radius() > 0.0)
    throw std::invalid_argument("shoot_ground_state: grid must not have an obstacle");
  if (model.kind() == NonlinearityModel::Kind::none)
    throw ShootingError("bisection bracket not found: model has no nonlinearity");
  const int N = grid.dimension();
  const double L = grid.outer_radius();
  const double dr = grid.spacing();
  const double h = dr / 4.0;

  const double z0 = turning_point(model, c);
  double lo = 0.5 * z0;
  double hi = 1.5 * z0;
  ShotResult lo_shot = shoot_once(model, c, N, lo, h, L);
  if (lo_shot.kind == Shot::crossed)
    throw ShootingError("bisection bracket not found: lower shot crosses zero");
  ShotResult hi_shot = shoot_once(model, c, N, hi, h, L);
  for (int i = 0; i < 60 && hi_shot.kind != Shot::crossed; ++i) {
    lo = hi;
    lo_shot = std::move(hi_shot);
    hi *= 1.5;
    hi_shot = shoot_once(model, c, N, hi, h, L);
  }
  if (hi_shot.kind != Shot::crossed)
    throw ShootingError("bisection bracket not found: no shot crosses zero");

  GroundState gs;
  gs.c = c;
  int steps = 0;
  while (hi - lo > 4e-16 * hi && steps < 200) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ShotResult s = shoot_once(model, c, N, mid, h, L);
    if (s.kind == Shot::crossed) {
      hi = mid;
      hi_shot = std::move(s);
    } else {
      lo = mid;
      lo_shot = std::move(s);
    }
    ++steps;
  }
  gs.bisection_steps = steps;
  gs.Q0 = lo;

  // Join where the bracketing shots separate; beyond it use the decaying
  // asymptotic tail of the linearized equation.
  const std::size_t n_common = std::min(lo_shot.Q.size(), hi_shot.Q.size());
  std::size_t join = n_common - 1;
  for (std::size_t i = 1; i < n_common; ++i) {
    const double a = lo_shot.Q[i], b = hi_shot.Q[i];
    if (std::abs(a - b) > 1e-6 * std::abs(a) || lo_shot.P[i] >= 0.0 || b <= 0.0) {
      join = i - 1;
      break;
    }
  }
  if (join % 2) --join;
  if (join < 4) throw ShootingError("no decay within domain: shots separate immediately");
  const double r_join = join * h;
  const double Q_join = lo_shot.Q[join];
  if (Q_join > 1e-4 * gs.Q0)
    throw ShootingError("no decay within domain: increase L");
  gs.r_join = r_join;

  const double sc = std::sqrt(c);
  auto tail_Q = [&](double r) {
    return Q_join * std::exp(-sc * (r - r_join)) * std::pow(r_join / r, 0.5 * (N - 1));
  };
  auto tail_P = [&](double r) {
    return -tail_Q(r) * (sc + 0.5 * (N - 1) / r);
  };

  const long n_fine = std::llround(L / h);
  gs.fine_r.resize(static_cast<std::size_t>(n_fine) + 1);
  gs.fine_Q.resize(gs.fine_r.size());
  std::vector<double> fine_P(gs.fine_r.size());
  for (std::size_t i = 0; i < gs.fine_r.size(); ++i) {
    const double r = i * h;
    gs.fine_r[i] = r;
    if (i <= join) {
      gs.fine_Q[i] = lo_shot.Q[i];
      fine_P[i] = lo_shot.P[i];
    } else {
      gs.fine_Q[i] = tail_Q(r);
      fine_P[i] = tail_P(r);
    }
  }

  // J^c and K^c with Simpson's rule on the fine samples (tail included up to
  // the last even index).
  const double omega = Grid::sphere_measure(N);
  std::size_t n_int = gs.fine_r.size() - 1;
  if (n_int % 2) --n_int;
  std::vector<double> j_int(n_int + 1), k_int(n_int + 1);
  for (std::size_t i = 0; i <= n_int; ++i) {
    const double r = gs.fine_r[i];
    const double q = gs.fine_Q[i];
    const double p = fine_P[i];
    const double wr = N == 1 ? 1.0 : std::pow(r, N - 1);
    const double base = p * p + c * q * q;
    j_int[i] = wr * (base - 2.0 * model.f(q));
    k_int[i] = wr * (base - q * model.fprime(q));
  }
  gs.m = omega * simpson(j_int, n_int, h);
  gs.K = omega * simpson(k_int, n_int, h);

  gs.profile.assign(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid.is_dirichlet(j)) continue;
    const double r = grid.radius(j);
    const auto i = static_cast<std::size_t>(std::llround(r / h));
    gs.profile[j] = i < gs.fine_Q.size() ? gs.fine_Q[i] : tail_Q(r);
  }

  const auto lap = laplacian(grid, gs.profile);
  double res = 0.0;
  for (std::size_t j = grid.first_free(); j <= grid.last_free(); ++j) {
    const double q = gs.profile[j];
    res = std::max(res, std::abs(-lap[j] + c * q - model.fprime(q)));
  }
  gs.residual = res;
  return gs;
}

const char* to_string(WellLabel l) {
  switch (l) {
    case WellLabel::Kplus: return "Kplus";
    case WellLabel::Kminus: return "Kminus";
    case WellLabel::above_threshold: return "above_threshold";
  }
  return "?";
}

Classification classify(std::span<const double> u0, std::span<const double> v0,
                        const Grid& grid, const NonlinearityModel& model, double m) {
  if (model.sign() != Sign::focusing)
    throw std::invalid_argument("classify requires a focusing model");
  Field f{{u0.begin(), u0.end()}, {v0.begin(), v0.end()}, 0.0};
  Classification c;
  c.E_value = total_energy(f, grid, model);
  c.K_value = virial_K(u0, grid, model);
  c.m_used = m;
  if (c.E_value < m)
    c.label = c.K_value >= 0.0 ? WellLabel::Kplus : WellLabel::Kminus;
  else
    c.label = WellLabel::above_threshold;
  return c;
}

std::vector<ProbeEntry> dichotomy_probe(const NonlinearityModel& model, const Grid& grid,
                                        const DamperProfile& damper,
                                        std::span<const double> kappas,
                                        const ProbeOptions& opts) {
  if (model.sign() != Sign::focusing)
    throw std::invalid_argument("dichotomy_probe requires a focusing model");
  const GroundState gs = shoot_ground_state(model, opts.c, grid);
  std::vector<ProbeEntry> out;
  for (double kappa : kappas) {
    Simulation sim{grid, damper, model, opts.scheme, {}, {}, opts.T_final,
                   opts.sample_stride, 0, {}};
    sim.u0 = gs.profile;
    for (double& x : sim.u0) x *= kappa;
    sim.v0.assign(grid.size(), 0.0);
    const RunHistory h = run(sim);

    ProbeEntry e{};
    e.kappa = kappa;
    e.classification = classify(sim.u0, sim.v0, grid, model, gs.m);
    e.blowup = h.blowup;
    e.blowup_time = h.blowup_time;
    e.E0 = h.E0();
    e.E_final = h.E_final();
    if (!h.blowup && !damper.identically_zero() && h.E_final() > 0.0) {
      const double t1 = opts.fit_t1 >= 0.0 ? opts.fit_t1 : 0.1 * opts.T_final;
      const double t2 = opts.fit_t2 >= 0.0 ? opts.fit_t2 : opts.T_final;
      e.gamma_fit = fit_decay_rate(h, t1, std::min(t2, h.t_final())).gamma_fit;
    }
    switch (e.classification.label) {
      case WellLabel::Kplus: e.consistent = !h.blowup; break;
      case WellLabel::Kminus: e.consistent = h.blowup; break;
      case WellLabel::above_threshold: e.consistent = true; break;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace kgdamp
