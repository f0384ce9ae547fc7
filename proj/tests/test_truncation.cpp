#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kgdamp/truncation.hpp"
#include "oracles.hpp"

using namespace kgdamp;

namespace {

const NonlinearityModel quartic = NonlinearityModel::power_sum({{1.0, 4.0}});

}  // namespace

TEST_CASE("first stage on the quartic: V_k(4) = 5, f_k(4) = 80") {
  // V = z^2, V' = 2z, k V'(k) |z/k|^theta = 2 sqrt(z) < z V'(z) for z > 1, so
  // V_k' = 2 z^{-1/2} and V_k(4) = 1 + int_1^4 2 y^{-1/2} dy.
  const double Vk4 = 1.0 + oracle::simpson([](double y) { return 2.0 / std::sqrt(y); }, 1, 4, 2000);
  CHECK(Vk4 == doctest::Approx(5.0).epsilon(1e-12));
  const auto tr = truncate_first(quartic, 0.5, 1.0);
  CHECK(tr.V(4.0) == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(std::abs(tr.f(4.0) - 80.0) <= 1e-6);
  CHECK(tr.f(-4.0) == tr.f(4.0));
  CHECK(quartic.f(4.0) == 256.0);
  CHECK_FALSE(tr.is_identity());
}

TEST_CASE("identity region |z| <= k") {
  const auto tr = truncate_first(quartic, 0.5, 1.0);
  CHECK(tr.f(0.5) == 0.0625);
  for (int i = 0; i <= 200; ++i) {
    const double z = -1.0 + i / 100.0;
    CHECK(tr.f(z) == quartic.f(z));
    CHECK(tr.fprime(z) == quartic.fprime(z));
  }
}

TEST_CASE("tabulated points inside |z| <= k carry f exactly") {
  const auto tr = truncate_first(quartic, 0.5, 2.0);
  int inside = 0;
  for (const auto& row : tr.table()) {
    if (row.z > 2.0) continue;
    ++inside;
    CHECK(row.f == quartic.f(row.z));
  }
  CHECK(inside > 0);
}

TEST_CASE("subcritical base is left unchanged") {
  // f = |u|^{2.4}: z V'(z) = 0.4 z^{0.4} <= 0.4 z^{0.5} for z >= 1.
  const auto base = NonlinearityModel::power_sum({{1.0, 2.4}});
  const auto tr = truncate_first(base, 0.5, 1.0);
  CHECK(tr.is_identity());
  for (double z : {0.3, 1.0, 2.0, 7.5, 30.0})
    CHECK(tr.f(z) == doctest::Approx(base.f(z)).epsilon(1e-12));
}

TEST_CASE("second stage: V_kl(9) = 9 and agreement below l") {
  const auto first = truncate_first(quartic, 0.5, 1.0);
  const auto kl = truncate_second(first, 4.0);
  // V_kl(9) = V_k(4) + int_4^9 2 y^{-1/2} dy = 5 + 4.
  const double expected =
      5.0 + oracle::simpson([](double y) { return 2.0 / std::sqrt(y); }, 4, 9, 2000);
  CHECK(kl.V(9.0) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(kl.V(9.0) == doctest::Approx(9.0).epsilon(1e-9));
  for (int i = 0; i <= 400; ++i) {
    const double z = 4.0 * i / 400.0;
    CHECK(kl.f(z) == doctest::Approx(first.f(z)).epsilon(1e-12));
  }
}

TEST_CASE("monotone approximation from below in k") {
  const auto t1 = truncate_first(quartic, 0.5, 1.0);
  const auto t2 = truncate_first(quartic, 0.5, 2.0);
  const auto exp_base = NonlinearityModel::exponential_power({1.0, 1.0, 2.0, 0.0});
  const auto e1 = truncate_first(exp_base, 0.5, 0.5);
  const auto e2 = truncate_first(exp_base, 0.5, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double z = 20.0 * (i + 0.5) / 1000.0;
    CHECK(t1.f(z) >= 0.0);
    CHECK(t1.f(z) <= t2.f(z) * (1.0 + 1e-12));
    CHECK(t2.f(z) <= quartic.f(z) * (1.0 + 1e-12));
    CHECK(e1.f(z) <= e2.f(z) * (1.0 + 1e-12));
    if (z < 5.0) CHECK(e2.f(z) <= exp_base.f(z) * (1.0 + 1e-12));
  }
}

TEST_CASE("first-stage growth cap") {
  const auto exp_base = NonlinearityModel::exponential_power({1.0, 1.0, 2.0, 0.0});
  for (const auto& tr : {truncate_first(quartic, 0.5, 1.0), truncate_first(exp_base, 0.3, 0.8)}) {
    const double k = tr.k();
    const double cap = tr.base().g(k) / (k * k);  // k V'(k), since z V' = g / z^2
    for (int i = 1; i <= 500; ++i) {
      const double z = k * std::pow(100.0, i / 500.0);
      CHECK(z * tr.Vprime(z) <= cap * std::pow(z / k, tr.theta()) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("V_k is dominated by 1 + z V_k' uniformly in k") {
  double worst = 0.0;
  for (double k : {0.5, 1.0, 2.0, 4.0}) {
    const auto tr = truncate_first(quartic, 0.5, k);
    for (int i = 0; i <= 400; ++i) {
      const double z = 50.0 * i / 400.0;
      worst = std::max(worst, tr.V(z) / (1.0 + z * tr.Vprime(z)));
    }
  }
  // V_k(z) <= V(k) + 2 V'(k) k (|z/k|^theta - 1) / theta gives a k-free bound.
  CHECK(worst <= 2.5);
}

TEST_CASE("second-stage Lipschitz ratio is finite") {
  const auto kl = truncate_second(truncate_first(quartic, 0.5, 1.0), 4.0);
  const double ratio = lipschitz_ratio(kl, 30.0, 301);
  CHECK(std::isfinite(ratio));
  CHECK(ratio > 0.0);
  MESSAGE("sup |f_kl'(z1) - f_kl'(z2)| / ((|z1|+|z2|)^theta |z1-z2|) = " << ratio);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(truncate_first(quartic, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(truncate_first(quartic, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(truncate_first(quartic, 0.5, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(
      truncate_first(NonlinearityModel::power_sum({{1.0, 4.0}}, Sign::focusing), 0.5, 1.0),
      std::invalid_argument);
  const auto first = truncate_first(quartic, 0.5, 1.0);
  CHECK_THROWS_AS(truncate_second(first, 0.5), std::invalid_argument);
}

TEST_CASE("theta bound by dimension") {
  // 2 + theta < 2N/(N-2), intersected with theta < 1.
  CHECK(max_theta(1) == 1.0);
  CHECK(max_theta(3) == 1.0);
  CHECK(max_theta(7) == doctest::Approx(14.0 / 5.0 - 2.0));
}

TEST_CASE("truncated model plugs in as a nonlinearity") {
  const auto tr = truncate_second(truncate_first(quartic, 0.5, 1.0), 4.0);
  const auto m = tr.as_model();
  for (double z : {0.0, 0.5, 2.0, 6.0, 25.0}) {
    CHECK(m.f(z) == tr.f(z));
    CHECK(m.fprime(-z) == -tr.fprime(z));
  }
}
