#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kgdamp/simulation.hpp"
#include "kgdamp/stepper.hpp"
#include "oracles.hpp"

using namespace kgdamp;

namespace {

std::vector<double> gaussian(const Grid& g, double amp, double width) {
  std::vector<double> u(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j)
    if (!g.is_dirichlet(j)) u[j] = amp * std::exp(-std::pow(g.coord(j) / width, 2));
  return u;
}

SchemeConfig scheme_with_dt(double dt) {
  SchemeConfig s;
  s.dt = dt;
  return s;
}

}  // namespace

TEST_CASE("zero field stays zero") {
  Grid g(1, 10.0, 0.1);
  DamperProfile d(g, 1.0, 2.0, 1.0);
  auto m = NonlinearityModel::power_sum({{1.0, 4.0}});
  Stepper st(g, d, m, scheme_with_dt(0.05));
  const std::vector<double> zero(g.size(), 0.0);
  auto s = st.start(zero, zero);
  for (int i = 0; i < 20; ++i) st.step(s);
  CHECK(max_abs(s.u_curr) == 0.0);
  CHECK(st.discrete_energy(s) == 0.0);
  CHECK(s.A == 0.0);
}

TEST_CASE("undamped linear standing wave keeps its energy") {
  Grid g(1, 5.0, 0.05);
  const DamperProfile d = DamperProfile::zero(g);
  const auto m = NonlinearityModel::none();
  const auto ep = first_dirichlet_eigenpair(g);
  Stepper st(g, d, m, scheme_with_dt(0.04));
  auto s = st.start(ep.vector, std::vector<double>(g.size(), 0.0));
  const double E0 = st.discrete_energy(s);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    st.step(s);
    worst = std::max(worst, std::abs(st.discrete_energy(s) - E0) / E0);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("per-step discrete energy identity and monotonicity") {
  struct Case {
    int N;
    NonlinearityModel model;
    bool damped;
  };
  const std::vector<Case> cases = {
      {1, NonlinearityModel::power_sum({{1.0, 4.0}}), true},
      {3, NonlinearityModel::power_sum({{1.0, 4.0}}), true},
      {1, NonlinearityModel::exponential_power({1.0, 1.0, 2.0, 0.0}), true},
      {3, NonlinearityModel::exponential_power({1.0, 1.0, 2.0, 0.0}), false},
      {1, NonlinearityModel::power_sum({{0.5, 4.0}}, Sign::focusing), true},
  };
  for (const auto& c : cases) {
    Grid g(c.N, 15.0, 0.05);
    const DamperProfile d = c.damped ? DamperProfile(g, 1.0, 3.0, 1.0) : DamperProfile::zero(g);
    Stepper st(g, d, c.model, scheme_with_dt(0.04));
    auto s = st.start(gaussian(g, 0.8, 1.5), gaussian(g, 0.3, 1.5));
    const double E0 = st.discrete_energy(s);
    double prev = E0, worst = 0.0, A_prev = 0.0;
    bool monotone = true;
    for (int i = 0; i < 300; ++i) {
      st.step(s);
      const double E = st.discrete_energy(s);
      worst = std::max(worst, std::abs(E - prev + 2.0 * s.last_increment));
      if (E > prev + 1e-9 * (1.0 + E0)) monotone = false;
      CHECK(s.A >= A_prev);
      A_prev = s.A;
      prev = E;
    }
    CHECK(worst <= 1e-9 * (1.0 + E0));
    CHECK(monotone);
  }
}

TEST_CASE("time reversal of the undamped scheme") {
  Grid g(3, 12.0, 0.05);
  const DamperProfile d = DamperProfile::zero(g);
  const auto m = NonlinearityModel::power_sum({{1.0, 4.0}});
  SchemeConfig sc = scheme_with_dt(0.04);
  sc.newton_tol = 1e-14;
  Stepper st(g, d, m, sc);
  auto s = st.start(gaussian(g, 1.0, 1.5), std::vector<double>(g.size(), 0.0));
  const auto u0 = s.u_prev, u1 = s.u_curr;
  const int n = 150;
  for (int i = 0; i < n; ++i) st.step(s);
  auto back = st.start_from_levels(s.u_curr, s.u_prev);
  for (int i = 0; i < n; ++i) st.step(back);
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    err = std::max({err, std::abs(back.u_curr[j] - u0[j]), std::abs(back.u_prev[j] - u1[j])});
  CHECK(err <= 1e-8);
}

TEST_CASE("discrete energy of a static sech profile") {
  for (double dr : {0.05, 0.025}) {
    Grid g(1, 30.0, dr);
    std::vector<double> u(g.size(), 0.0);
    for (std::size_t j = 0; j < g.size(); ++j)
      if (!g.is_dirichlet(j)) u[j] = oracle::sech(g.coord(j));
    const DamperProfile d = DamperProfile::zero(g);
    const auto m = NonlinearityModel::none();
    Stepper st(g, d, m, scheme_with_dt(0.3 * dr));
    const double expected = oracle::kIntSechPrime2 + oracle::kIntSech2;
    CHECK(std::abs(st.discrete_energy(u, u) - expected) <= dr * dr);
  }
}

TEST_CASE("K- data blows up") {
  Grid g(1, 40.0, 0.05);
  const DamperProfile d = DamperProfile::zero(g);
  const auto m = NonlinearityModel::power_sum({{0.5, 4.0}}, Sign::focusing);
  Stepper st(g, d, m, scheme_with_dt(0.04));
  std::vector<double> u(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j)
    if (!g.is_dirichlet(j)) u[j] = 1.05 * oracle::sech(g.coord(j));
  auto s = st.start(u, std::vector<double>(g.size(), 0.0));
  bool blew = false;
  try {
    for (int i = 0; i < 2000; ++i) st.step(s);
  } catch (const BlowupDetected& e) {
    blew = true;
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 50.0);
    CHECK(std::string(e.what()).find("blowup detected") != std::string::npos);
  }
  CHECK(blew);
}

TEST_CASE("difference quotient is what makes the identity exact") {
  Grid g(1, 15.0, 0.05);
  DamperProfile d(g, 1.0, 3.0, 1.0);
  const auto m = NonlinearityModel::power_sum({{1.0, 4.0}});
  SchemeConfig sc = scheme_with_dt(0.04);
  sc.use_difference_quotient = false;
  Stepper st(g, d, m, sc);
  auto s = st.start(gaussian(g, 1.0, 1.5), std::vector<double>(g.size(), 0.0));
  const double E0 = st.discrete_energy(s);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    st.step(s);
    worst = std::max(worst, std::abs(st.discrete_energy(s) - E0 + 2.0 * s.A));
  }
  CHECK(worst > 1e-8 * (1.0 + E0));
}

TEST_CASE("leapfrog agrees with the conservative scheme to second order") {
  Grid g(1, 15.0, 0.05);
  const DamperProfile d(g, 1.0, 3.0, 1.0);
  const auto m = NonlinearityModel::power_sum({{1.0, 4.0}});
  auto run_to = [&](Scheme kind, double dt) {
    SchemeConfig sc = scheme_with_dt(dt);
    sc.scheme = kind;
    Stepper st(g, d, m, sc);
    auto s = st.start(gaussian(g, 0.8, 1.5), std::vector<double>(g.size(), 0.0));
    const int n = static_cast<int>(std::lround(2.0 / dt));
    for (int i = 1; i < n; ++i) st.step(s);
    return s.u_curr;
  };
  double prev = 0.0;
  for (double dt : {0.04, 0.02}) {
    const auto a = run_to(Scheme::conservative, dt);
    const auto b = run_to(Scheme::leapfrog_explicit, dt);
    double diff = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) diff = std::max(diff, std::abs(a[j] - b[j]));
    CHECK(diff <= 0.05 * dt * dt * 100);
    if (prev > 0.0) CHECK(prev / diff > 3.0);
    prev = diff;
  }
}

TEST_CASE("CFL rules") {
  Grid g(1, 10.0, 0.1);
  SchemeConfig sc = scheme_with_dt(0.11);
  CHECK_THROWS_WITH_AS(validate(sc, g), doctest::Contains("CFL violation"), std::invalid_argument);
  sc.dt = 0.1;
  CHECK_NOTHROW(validate(sc, g));
  sc.scheme = Scheme::leapfrog_explicit;
  CHECK_THROWS_WITH_AS(validate(sc, g), doctest::Contains("CFL violation"), std::invalid_argument);
  sc.dt = 0.09;
  CHECK_NOTHROW(validate(sc, g));
  sc.dt = 0.0;
  CHECK_THROWS_AS(validate(sc, g), std::invalid_argument);
}

TEST_CASE("run bookkeeping") {
  Grid g(1, 10.0, 0.1);
  const DamperProfile d(g, 1.0, 2.0, 1.0);
  const auto m = NonlinearityModel::power_sum({{1.0, 4.0}});
  Simulation sim{g, d, m, scheme_with_dt(0.05), gaussian(g, 0.5, 1.0),
                 std::vector<double>(g.size(), 0.0), 0.0, 1, 0, {}};
  SUBCASE("T_final = 0 gives one record") {
    const auto h = run(sim);
    CHECK(h.records.size() == 1);
    CHECK(h.records[0].t == 0.0);
  }
  SUBCASE("row count is floor(T / (dt stride)) + 1") {
    sim.T_final = 3.0;
    sim.sample_stride = 4;
    const auto h = run(sim);
    CHECK(h.records.size() == static_cast<std::size_t>(std::floor(3.0 / (0.05 * 4))) + 1);
    for (std::size_t i = 1; i < h.records.size(); ++i)
      CHECK(h.records[i].E <= h.records[i - 1].E + 1e-12);
  }
}
