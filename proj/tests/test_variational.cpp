#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kgdamp/diagnostics.hpp"
#include "kgdamp/variational.hpp"
#include "oracles.hpp"

using namespace kgdamp;

namespace {

NonlinearityModel half_quartic(double lambda = 0.5) {
  return NonlinearityModel::power_sum({{lambda, 4.0}}, Sign::focusing);
}

std::vector<double> scaled_sech(const Grid& g, double kappa) {
  std::vector<double> u(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j)
    if (!g.is_dirichlet(j)) u[j] = kappa * oracle::sech(g.coord(j));
  return u;
}

}  // namespace

TEST_CASE("ground state of u^4/2 in one dimension is sech") {
  Grid g(1, 40.0, 0.05);
  const auto gs = shoot_ground_state(half_quartic(), 1.0, g);
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    err = std::max(err, std::abs(gs.profile[j] - (g.is_dirichlet(j) ? 0.0 : oracle::sech(g.coord(j)))));
  CHECK(err <= 1e-6);
  CHECK(gs.Q0 == doctest::Approx(1.0).epsilon(1e-6));
  // J(Q) = int Q'^2 + Q^2 - Q^4 = 2/3 + 2 - 4/3.
  const double m_exact = oracle::kIntSechPrime2 + oracle::kIntSech2 - oracle::kIntSech4;
  CHECK(std::abs(gs.m - m_exact) <= 1e-4);
  CHECK(std::abs(gs.K) <= 1e-6);
  CHECK(gs.c == 1.0);
  CHECK(gs.r_join > 0.0);
  CHECK(gs.r_join < 40.0);
}

TEST_CASE("turning point of u^4/2 at c = 1") {
  // c z^2 - 2 f(z) = z^2 - z^4 vanishes at z = 1.
  CHECK(turning_point(half_quartic(), 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  // lambda u^4: z^2 = 2 lambda z^4.
  CHECK(turning_point(half_quartic(2.0), 1.0) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("ground state shape and residual in three dimensions") {
  double prev_J = 0.0, prev_K = 0.0;
  for (double dr : {0.1, 0.05}) {
    Grid g(3, 20.0, dr);
    const auto gs = shoot_ground_state(half_quartic(), 1.0, g);
    CHECK(gs.Q0 > turning_point(half_quartic(), 1.0));
    for (std::size_t j = g.first_free(); j <= g.last_free(); ++j) {
      CHECK(gs.profile[j] > 0.0);
      if (j > g.first_free() && gs.profile[j] > 1e-200) CHECK(gs.profile[j] < gs.profile[j - 1]);
    }
    CHECK(gs.profile[g.last_free()] < 1e-6 * gs.Q0);
    // Pohozaev: K = 0 up to quadrature error.
    CHECK(std::abs(gs.K) <= 10 * dr * dr);
    // Stencil error on a smooth profile, scaled by the size of f'(Q).
    CHECK(gs.residual <= 10 * dr * dr * std::pow(gs.Q0, 3));
    // Grid functionals approach the ODE values at second order.
    const double eJ = std::abs(static_J(gs.profile, g, half_quartic()) - gs.m);
    const double eK = std::abs(virial_K(gs.profile, g, half_quartic()));
    CHECK(eJ <= 5 * dr * dr * gs.m);
    CHECK(eK <= 5 * dr * dr * gs.m);
    if (prev_J > 0.0) {
      CHECK(prev_J / eJ > 3.5);
      CHECK(prev_K / eK > 3.5);
    }
    prev_J = eJ;
    prev_K = eK;
  }
}

TEST_CASE("ground state is the maximum of J along the scaling ray") {
  for (int N : {1, 3}) {
    Grid g(N, 20.0, 0.05);
    const auto model = half_quartic();
    const auto gs = shoot_ground_state(model, 1.0, g);
    const double JQ = static_J(gs.profile, g, model);
    for (double kappa : {0.9, 1.1}) {
      std::vector<double> u = gs.profile;
      for (double& x : u) x *= kappa;
      CHECK(static_J(u, g, model) < JQ);
    }
  }
}

TEST_CASE("threshold scales as 1/lambda") {
  // Q_lambda = Q / sqrt(lambda), so m(lambda) = m(1) / lambda in every dimension.
  Grid g(3, 20.0, 0.05);
  const double m1 = shoot_ground_state(half_quartic(1.0), 1.0, g).m;
  double prev = 1e300;
  for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
    const double m = shoot_ground_state(half_quartic(lambda), 1.0, g).m;
    CHECK(m < prev);
    CHECK(m == doctest::Approx(m1 / lambda).epsilon(1e-6));
    prev = m;
  }
}

TEST_CASE("classification examples") {
  Grid g(1, 40.0, 0.05);
  const auto model = half_quartic();
  const double m = 4.0 / 3.0;
  const std::vector<double> zero(g.size(), 0.0);

  const auto c0 = classify(zero, zero, g, model, m);
  CHECK(c0.label == WellLabel::Kplus);
  CHECK(c0.E_value == 0.0);
  CHECK(c0.K_value == 0.0);

  const auto below = classify(scaled_sech(g, 0.95), zero, g, model, m);
  CHECK(below.label == WellLabel::Kplus);
  CHECK(below.E_value == doctest::Approx(oracle::J_scaled(0.95)).epsilon(1e-4));
  CHECK(below.K_value == doctest::Approx(oracle::K_scaled(0.95)).epsilon(1e-3));

  const auto above = classify(scaled_sech(g, 1.05), zero, g, model, m);
  CHECK(above.label == WellLabel::Kminus);
  CHECK(above.E_value == doctest::Approx(1.31933).epsilon(1e-4));
  CHECK(above.K_value == doctest::Approx(-0.30135).epsilon(1e-3));

  // Adding kinetic energy pushes the same profile over the threshold.
  std::vector<double> v(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = 0.5 * oracle::sech(g.coord(j));
  const auto over = classify(scaled_sech(g, 0.95), v, g, model, m);
  CHECK(over.label == WellLabel::above_threshold);
  CHECK(over.m_used == m);

  CHECK_THROWS_AS(classify(zero, zero, g, NonlinearityModel::power_sum({{0.5, 4.0}}), m),
                  std::invalid_argument);
  CHECK(std::string(to_string(WellLabel::Kminus)) == "Kminus");
}

TEST_CASE("labels are stable under refinement") {
  for (double kappa : {0.9, 0.95, 1.05, 1.1}) {
    std::vector<WellLabel> labels;
    for (double dr : {0.1, 0.05, 0.025}) {
      Grid g(1, 30.0, dr);
      const auto model = half_quartic();
      const double m = shoot_ground_state(model, 1.0, g).m;
      labels.push_back(classify(scaled_sech(g, kappa), std::vector<double>(g.size(), 0.0), g,
                                model, m).label);
    }
    CHECK(labels[0] == labels[1]);
    CHECK(labels[1] == labels[2]);
  }
}

TEST_CASE("shooting errors") {
  Grid g(1, 40.0, 0.05);
  CHECK_THROWS_WITH(shoot_ground_state(NonlinearityModel::none(), 1.0, g),
                    doctest::Contains("bisection bracket not found"));
  CHECK_THROWS_AS(shoot_ground_state(half_quartic(), 0.0, g), std::invalid_argument);
  Grid tiny(1, 2.0, 0.05);
  CHECK_THROWS_WITH(shoot_ground_state(half_quartic(), 1.0, tiny),
                    doctest::Contains("no decay within domain"));
}

TEST_CASE("dichotomy probe with zero data") {
  Grid g(1, 20.0, 0.1);
  const DamperProfile d(g, 1.0, 3.0, 1.0);
  const std::vector<double> kappas{0.0};
  ProbeOptions opts;
  opts.scheme.dt = 0.05;
  opts.T_final = 5.0;
  const auto res = dichotomy_probe(half_quartic(), g, d, kappas, opts);
  REQUIRE(res.size() == 1);
  CHECK(res[0].classification.label == WellLabel::Kplus);
  CHECK_FALSE(res[0].blowup);
  CHECK(res[0].E0 == 0.0);
  CHECK(res[0].E_final == 0.0);
  CHECK(res[0].consistent);
}
