#include "kgdamp/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kgdamp {

Scheme scheme_from_string(const std::string& s) {
  if (s == "conservative") return Scheme::conservative;
  if (s == "leapfrog_explicit") return Scheme::leapfrog_explicit;
  throw std::invalid_argument("unknown scheme '" + s +
                              "' (expected conservative|leapfrog_explicit)");
}

const char* to_string(Scheme s) {
  return s == Scheme::conservative ? "conservative" : "leapfrog_explicit";
}

void validate(const SchemeConfig& sc, const Grid& grid) {
  if (!(sc.dt > 0.0)) throw std::invalid_argument("scheme: dt must be > 0");
  const double dr = grid.spacing();
  if (sc.scheme == Scheme::leapfrog_explicit && sc.dt > 0.9 * dr * (1 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violation: leapfrog_explicit needs dt <= 0.9*dr (dt=" << sc.dt
       << ", dr=" << dr << ")";
    throw std::invalid_argument(os.str());
  }
  if (sc.scheme == Scheme::conservative && sc.dt > dr * (1 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violation: conservative scheme needs dt <= dr (dt=" << sc.dt
       << ", dr=" << dr << ")";
    throw std::invalid_argument(os.str());
  }
  if (!(sc.newton_tol > 0.0)) throw std::invalid_argument("scheme: newton_tol must be > 0");
  if (sc.newton_max_iter < 1) throw std::invalid_argument("scheme: newton_max_iter must be >= 1");
  if (!(sc.sv_epsilon >= 0.0)) throw std::invalid_argument("scheme: sv_epsilon must be >= 0");
  if (!(sc.blowup_threshold > 0.0))
    throw std::invalid_argument("scheme: blowup_threshold must be > 0");
}

Stepper::Stepper(const Grid& grid, const DamperProfile& damper,
                 const NonlinearityModel& model, SchemeConfig scheme)
    : grid_(grid), damper_(damper), model_(model), scheme_(scheme),
      s_(model.sign_factor()) {
  validate(scheme_, grid_);
  if (damper_.values().size() != grid_.size())
    throw std::invalid_argument("stepper: damper not built on this grid");
  const std::size_t n = grid_.size();
  const auto c = grid_.edge_coeffs();
  const auto w = grid_.weights();
  lap_diag_.assign(n, 0.0);
  lap_lower_.assign(n, 0.0);
  lap_upper_.assign(n, 0.0);
  for (std::size_t j = grid_.first_free(); j <= grid_.last_free(); ++j) {
    const double cl = j > 0 ? c[j - 1] : 0.0;
    lap_lower_[j] = cl / w[j];
    lap_upper_[j] = c[j] / w[j];
    lap_diag_[j] = -(c[j] + cl) / w[j];
  }
}

StepState Stepper::start(std::span<const double> u0, std::span<const double> v0) const {
  check_size(grid_, u0, "stepper.start u0");
  check_size(grid_, v0, "stepper.start v0");
  const double dt = scheme_.dt;
  const auto a = damper_.values();
  const auto lap = laplacian(grid_, u0);
  StepState st;
  st.dt = dt;
  st.u_prev.assign(u0.begin(), u0.end());
  st.u_curr.assign(grid_.size(), 0.0);
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    if (grid_.is_dirichlet(j)) {
      st.u_prev[j] = 0.0;
      continue;
    }
    const double acc = lap[j] - u0[j] - s_ * model_.fprime(u0[j]) - a[j] * v0[j];
    st.u_curr[j] = u0[j] + dt * v0[j] + 0.5 * dt * dt * acc;
  }
  st.u_back = st.u_prev;
  st.level = 1;
  return st;
}

StepState Stepper::start_from_levels(std::span<const double> u_prev,
                                     std::span<const double> u_curr) const {
  check_size(grid_, u_prev, "stepper.start_from_levels");
  check_size(grid_, u_curr, "stepper.start_from_levels");
  StepState st;
  st.dt = scheme_.dt;
  st.u_prev.assign(u_prev.begin(), u_prev.end());
  st.u_curr.assign(u_curr.begin(), u_curr.end());
  st.u_back = st.u_prev;
  st.level = 1;
  return st;
}

double Stepper::quotient(double up, double um) const {
  const double d = up - um;
  if (scheme_.use_difference_quotient && std::abs(d) > scheme_.sv_epsilon)
    return (model_.f(up) - model_.f(um)) / d;
  return model_.fprime(0.5 * (up + um));
}

double Stepper::quotient_derivative(double up, double um) const {
  const double d = up - um;
  if (scheme_.use_difference_quotient &&
      std::abs(d) > 1e-5 * (1.0 + std::abs(up) + std::abs(um)))
    return (model_.fprime(up) * d - (model_.f(up) - model_.f(um))) / (d * d);
  return 0.5 * model_.fsecond(0.5 * (up + um));
}

void Stepper::explicit_leapfrog(const std::vector<double>& u0,
                                const std::vector<double>& um,
                                std::vector<double>& up) const {
  const double dt = scheme_.dt;
  const auto a = damper_.values();
  const auto lap = laplacian(grid_, u0);
  up.assign(grid_.size(), 0.0);
  for (std::size_t j = grid_.first_free(); j <= grid_.last_free(); ++j) {
    const double h = 0.5 * a[j] * dt;
    const double rhs = 2.0 * u0[j] - (1.0 - h) * um[j] +
                       dt * dt * (lap[j] - u0[j] - s_ * model_.fprime(u0[j]));
    up[j] = rhs / (1.0 + h);
  }
}

void Stepper::solve_conservative(const std::vector<double>& u0,
                                 const std::vector<double>& um,
                                 std::vector<double>& up, double t_next,
                                 int& iters) {
  const double dt = scheme_.dt;
  const double idt2 = 1.0 / (dt * dt);
  const auto a = damper_.values();
  const std::size_t lo = grid_.first_free();
  const std::size_t hi = grid_.last_free();
  const std::size_t m = hi - lo + 1;
  res_.resize(m);
  lo_.resize(m);
  di_.resize(m);
  up_.resize(m);

  // Explicit predictor; fall back to linear extrapolation if it misbehaves.
  try {
    explicit_leapfrog(u0, um, up);
    for (double x : up)
      if (!std::isfinite(x)) throw RangeError("predictor", x);
  } catch (const RangeError&) {
    up.assign(grid_.size(), 0.0);
    for (std::size_t j = lo; j <= hi; ++j) up[j] = 2.0 * u0[j] - um[j];
  }

  for (iters = 1; iters <= scheme_.newton_max_iter; ++iters) {
    double rmax = 0.0;
    std::size_t rnode = lo;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = lo + i;
      const double sp = up[j] + um[j];
      double lap = lap_diag_[j] * sp + lap_upper_[j] * (up[j + 1] + um[j + 1]);
      if (j > 0) lap += lap_lower_[j] * (up[j - 1] + um[j - 1]);
      const double r = (up[j] - 2.0 * u0[j] + um[j]) * idt2 +
                       a[j] * (up[j] - um[j]) / (2.0 * dt) - 0.5 * lap + 0.5 * sp +
                       s_ * quotient(up[j], um[j]);
      res_[i] = -r;
      if (!(std::abs(r) <= rmax)) {
        rmax = std::abs(r);
        rnode = j;
      }
      di_[i] = idt2 + a[j] / (2.0 * dt) - 0.5 * lap_diag_[j] + 0.5 +
               s_ * quotient_derivative(up[j], um[j]);
      lo_[i] = -0.5 * lap_lower_[j];
      up_[i] = -0.5 * lap_upper_[j];
    }
    if (!std::isfinite(rmax)) {
      std::ostringstream os;
      os << "newton divergence at t=" << t_next << ": non-finite residual at node "
         << rnode;
      throw NewtonDivergence(os.str(), rnode, rmax);
    }
    solve_tridiagonal(lo_, di_, up_, res_);
    double dmax = 0.0;
    double umax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      up[lo + i] += res_[i];
      dmax = std::max(dmax, std::abs(res_[i]));
      umax = std::max(umax, std::abs(up[lo + i]));
    }
    if (!std::isfinite(dmax)) {
      std::ostringstream os;
      os << "newton divergence at t=" << t_next << ": non-finite update";
      throw NewtonDivergence(os.str(), rnode, rmax);
    }
    if (dmax <= scheme_.newton_tol * (1.0 + umax)) return;
    if (iters == scheme_.newton_max_iter) {
      std::ostringstream os;
      os << "newton divergence at t=" << t_next << ": node " << rnode
         << " residual " << rmax << " after " << iters << " iterations";
      throw NewtonDivergence(os.str(), rnode, rmax);
    }
  }
}

bool Stepper::growth_indicates_blowup() const {
  if (recent_max_.size() < 2) return false;
  return recent_max_.back() >= 2.0 * recent_max_.front();
}

void Stepper::step(StepState& st) {
  const double t_next = st.dt * static_cast<double>(st.level + 1);
  std::vector<double> next;
  try {
    if (scheme_.scheme == Scheme::conservative) {
      solve_conservative(st.u_curr, st.u_prev, next, t_next, st.last_newton_iters);
    } else {
      explicit_leapfrog(st.u_curr, st.u_prev, next);
      st.last_newton_iters = 0;
    }
  } catch (const NewtonDivergence& e) {
    if (growth_indicates_blowup()) {
      std::ostringstream os;
      os << "blowup detected at t=" << st.time() << " (solver breakdown with max|u| "
         << recent_max_.back() << " at least doubled within 10 steps)";
      throw BlowupDetected(os.str(), st.time(), recent_max_.back());
    }
    throw;
  } catch (const RangeError& e) {
    if (growth_indicates_blowup()) {
      std::ostringstream os;
      os << "blowup detected at t=" << st.time() << " (" << e.what() << ")";
      throw BlowupDetected(os.str(), st.time(), recent_max_.back());
    }
    throw;
  }

  const double mx = max_abs(next);
  if (!std::isfinite(mx) || mx > scheme_.blowup_threshold) {
    std::ostringstream os;
    os << "blowup detected at t=" << t_next << " (max|u|=" << mx << ")";
    throw BlowupDetected(os.str(), t_next, mx);
  }
  recent_max_.push_back(mx);
  if (recent_max_.size() > 11) recent_max_.pop_front();

  const double dt = st.dt;
  const auto a = damper_.values();
  const auto w = grid_.weights();
  double inc = 0.0;
  for (std::size_t j = 0; j < next.size(); ++j) {
    const double vb = (next[j] - st.u_prev[j]) / (2.0 * dt);
    inc += w[j] * a[j] * vb * vb;
  }
  inc *= dt;
  st.A += inc;
  st.last_increment = inc;

  std::swap(st.u_back, st.u_prev);
  std::swap(st.u_prev, st.u_curr);
  st.u_curr = std::move(next);
  ++st.level;
}

double Stepper::discrete_free_energy(std::span<const double> u0,
                                     std::span<const double> u1) const {
  const double dt = scheme_.dt;
  const auto w = grid_.weights();
  double s = 0.0;
  for (std::size_t j = 0; j < u0.size(); ++j) {
    const double d = (u1[j] - u0[j]) / dt;
    s += w[j] * (d * d + 0.5 * (u1[j] * u1[j] + u0[j] * u0[j]));
  }
  return s + 0.5 * (gradient_energy(grid_, u0) + gradient_energy(grid_, u1));
}

double Stepper::discrete_energy(std::span<const double> u0,
                                std::span<const double> u1) const {
  check_size(grid_, u0, "discrete_energy");
  check_size(grid_, u1, "discrete_energy");
  const auto w = grid_.weights();
  double nl = 0.0;
  if (model_.kind() != NonlinearityModel::Kind::none)
    for (std::size_t j = 0; j < u0.size(); ++j)
      nl += w[j] * (model_.f(u1[j]) + model_.f(u0[j]));
  return discrete_free_energy(u0, u1) + s_ * nl;
}

double Stepper::discrete_energy(const StepState& st) const {
  return discrete_energy(st.u_prev, st.u_curr);
}

std::vector<double> Stepper::centered_velocity(const StepState& st) const {
  std::vector<double> v(st.u_curr.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    v[j] = (st.u_curr[j] - st.u_back[j]) / (2.0 * st.dt);
  return v;
}

}  // namespace kgdamp
