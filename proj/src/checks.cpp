#include "kgdamp/checks.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "kgdamp/simulation.hpp"
#include "kgdamp/variational.hpp"

namespace kgdamp {

namespace {

std::string format(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

std::vector<double> gaussian(const Grid& g, double amp, double width) {
  std::vector<double> u(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j)
    if (!g.is_dirichlet(j)) u[j] = amp * std::exp(-std::pow(g.coord(j) / width, 2));
  return u;
}

CheckResult energy_identity(const CheckOptions& opts) {
  double worst = 0.0, E0 = 0.0;
  for (int N : {1, 3}) {
    Grid g(N, 20.0, 0.05);
    DamperProfile d(g, 1.0, 3.0, 1.0, DamperShape::smoothstep, 1.0);
    auto model = NonlinearityModel::power_sum({{1.0, 4.0}});
    SchemeConfig sc;
    sc.dt = 0.04;
    sc.use_difference_quotient = opts.use_difference_quotient;
    Simulation sim{g, d, model, sc, gaussian(g, 1.0, 1.5), std::vector<double>(g.size(), 0.0),
                   8.0, 5, 0, {}};
    const RunHistory h = run(sim);
    for (const auto& r : h.records)
      worst = std::max(worst, std::abs(r.E - h.E0() + 2.0 * r.A_cum) / (1.0 + h.E0()));
    E0 = std::max(E0, h.E0());
  }
  return {"energy_identity", worst <= 1e-8,
          format("max |E - E0 + 2A| / (1 + E0) = %.3g (E0 up to %.4g)", worst, E0)};
}

CheckResult reversibility(const CheckOptions& opts) {
  Grid g(1, 20.0, 0.05);
  const DamperProfile d = DamperProfile::zero(g);
  auto model = NonlinearityModel::power_sum({{1.0, 4.0}});
  SchemeConfig sc;
  sc.dt = 0.04;
  sc.newton_tol = 1e-14;
  sc.use_difference_quotient = opts.use_difference_quotient;
  Stepper stepper(g, d, model, sc);
  const auto u0 = gaussian(g, 1.0, 1.5);
  StepState st = stepper.start(u0, std::vector<double>(g.size(), 0.0));
  const int n = 100;
  for (int i = 0; i < n; ++i) stepper.step(st);
  StepState back = stepper.start_from_levels(st.u_curr, st.u_prev);
  for (int i = 0; i < n; ++i) stepper.step(back);
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(back.u_curr[j] - u0[j]));
  return {"reversibility", err <= 1e-8, format("max |u_back(0) - u0| after %g steps = %.3g", n, err)};
}

CheckResult ground_state(const CheckOptions&) {
  Grid g(1, 40.0, 0.05);
  auto model = NonlinearityModel::power_sum({{0.5, 4.0}}, Sign::focusing);
  const GroundState gs = shoot_ground_state(model, 1.0, g);
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    err = std::max(err, std::abs(gs.profile[j] - (g.is_dirichlet(j) ? 0.0 : 1.0 / std::cosh(g.coord(j)))));
  const bool ok = err <= 1e-6 && std::abs(gs.m - 4.0 / 3.0) <= 1e-4 && std::abs(gs.K) <= 1e-6;
  return {"ground_state", ok, format("max |Q - sech| = %.3g, m - 4/3 = %.3g", err, gs.m - 4.0 / 3.0)};
}

CheckResult classification(const CheckOptions&) {
  Grid g(1, 40.0, 0.05);
  auto model = NonlinearityModel::power_sum({{0.5, 4.0}}, Sign::focusing);
  std::vector<double> sech(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j)
    if (!g.is_dirichlet(j)) sech[j] = 1.0 / std::cosh(g.coord(j));
  const std::vector<double> zero(g.size(), 0.0);
  const double m = 4.0 / 3.0;
  auto scaled = [&](double k) {
    auto u = sech;
    for (double& x : u) x *= k;
    return u;
  };
  const auto c0 = classify(zero, zero, g, model, m);
  const auto c1 = classify(scaled(0.95), zero, g, model, m);
  const auto c2 = classify(scaled(1.05), zero, g, model, m);
  const bool ok = c0.label == WellLabel::Kplus && c1.label == WellLabel::Kplus &&
                  c2.label == WellLabel::Kminus;
  return {"classification", ok,
          std::string("0 -> ") + to_string(c0.label) + ", 0.95Q -> " + to_string(c1.label) +
              ", 1.05Q -> " + to_string(c2.label)};
}

using CheckFn = std::function<CheckResult(const CheckOptions&)>;

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> r = {
      {"energy_identity", energy_identity},
      {"reversibility", reversibility},
      {"ground_state", ground_state},
      {"classification", classification},
  };
  return r;
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : registry()) out.push_back(name);
  return out;
}

std::vector<CheckResult> run_checks(const CheckOptions& opts) {
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : registry()) {
    if (!opts.filter.empty() && name.find(opts.filter) == std::string::npos) continue;
    try {
      out.push_back(fn(opts));
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  }
  return out;
}

int cmd_check(const CheckOptions& opts, std::ostream& out) {
  const auto results = run_checks(opts);
  int failed = 0;
  for (const auto& r : results) {
    char line[64];
    std::snprintf(line, sizeof line, "%-4s %-16s ", r.passed ? "PASS" : "FAIL", r.name.c_str());
    out << line << r.detail << "\n";
    if (!r.passed) ++failed;
  }
  out << results.size() << " checks, " << failed << " failed\n";
  return failed ? 1 : 0;
}

}  // namespace kgdamp
