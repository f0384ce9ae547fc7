#include "kgdamp/nonlinearity.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kgdamp {

namespace {

// exp() overflows a little above 709.78.
constexpr double kMaxExponent = 700.0;

double checked_exp(double x, double u) {
  if (x > kMaxExponent) {
    std::ostringstream os;
    os << "magnitude exceeds model range at u = " << u;
    throw RangeError(os.str(), u);
  }
  return std::exp(x);
}

double sgn(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0); }

// e^s - 1 - s - s^2/2 without cancellation for small s.
double exp_minus_quadratic(double s) {
  if (std::abs(s) < 0.5) {
    double term = s * s * s / 6.0;
    double sum = 0.0;
    for (int k = 4; k < 40 && std::abs(term) > 1e-300; ++k) {
      sum += term;
      term *= s / k;
    }
    return sum;
  }
  return std::expm1(s) - s - 0.5 * s * s;
}

// e^s - 1 - s
double exp_minus_linear(double s) {
  if (std::abs(s) < 0.5) {
    double term = s * s / 2.0;
    double sum = 0.0;
    for (int k = 3; k < 40 && std::abs(term) > 1e-300; ++k) {
      sum += term;
      term *= s / k;
    }
    return sum;
  }
  return std::expm1(s) - s;
}

}  // namespace

const char* to_string(Sign s) {
  return s == Sign::defocusing ? "defocusing" : "focusing";
}

Sign sign_from_string(const std::string& s) {
  if (s == "defocusing") return Sign::defocusing;
  if (s == "focusing") return Sign::focusing;
  throw std::invalid_argument("unknown mode '" + s +
                              "' (expected defocusing|focusing)");
}

NonlinearityModel NonlinearityModel::none(Sign sign) {
  NonlinearityModel m;
  m.kind_ = Kind::none;
  m.sign_ = sign;
  return m;
}

NonlinearityModel NonlinearityModel::power_sum(std::vector<PowerTerm> terms,
                                               Sign sign) {
  for (const auto& t : terms) {
    if (!(t.lambda > 0.0)) throw std::invalid_argument("power_sum: lambda must be > 0");
    if (!(t.p > 2.0)) throw std::invalid_argument("power_sum: p must be > 2");
  }
  NonlinearityModel m;
  m.kind_ = terms.empty() ? Kind::none : Kind::power_sum;
  m.terms_ = std::move(terms);
  m.sign_ = sign;
  return m;
}

NonlinearityModel NonlinearityModel::exponential_power(ExpPowerParams params,
                                                       Sign sign) {
  if (params.lambda < 0 || params.mu < 0 || params.nu < 0 || params.alpha < 0)
    throw std::invalid_argument("exponential_power: parameters must be >= 0");
  if (params.mu > 0 && params.nu <= 0)
    throw std::invalid_argument("exponential_power: nu must be > 0 when mu > 0");
  NonlinearityModel m;
  m.kind_ = Kind::exponential_power;
  m.exp_ = params;
  m.sign_ = sign;
  return m;
}

NonlinearityModel NonlinearityModel::exp2d(Sign sign) {
  NonlinearityModel m;
  m.kind_ = Kind::exp2d;
  m.sign_ = sign;
  return m;
}

NonlinearityModel NonlinearityModel::custom(CustomPotential potential,
                                            Sign sign) {
  if (!potential.f || !potential.fprime)
    throw std::invalid_argument("custom potential needs f and f'");
  NonlinearityModel m;
  m.kind_ = Kind::custom;
  m.custom_ = std::move(potential);
  m.sign_ = sign;
  return m;
}

double NonlinearityModel::f(double u) const {
  const double s = std::abs(u);
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::power_sum: {
      double sum = 0.0;
      for (const auto& t : terms_) sum += t.lambda * std::pow(s, t.p);
      if (!std::isfinite(sum)) throw RangeError("magnitude exceeds model range", u);
      return sum;
    }
    case Kind::exponential_power: {
      if (s == 0.0) return 0.0;
      const double e = checked_exp(exp_.mu * std::pow(s, exp_.nu), u);
      return exp_.lambda * e * std::pow(s, 2.0 + exp_.alpha);
    }
    case Kind::exp2d: {
      const double x = 4.0 * std::numbers::pi * u * u;
      if (x > kMaxExponent) checked_exp(x, u);
      return exp_minus_quadratic(x);
    }
    case Kind::custom:
      return custom_.f(u);
  }
  return 0.0;
}

double NonlinearityModel::fprime(double u) const {
  const double s = std::abs(u);
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::power_sum: {
      double sum = 0.0;
      for (const auto& t : terms_) sum += t.lambda * t.p * std::pow(s, t.p - 1.0);
      if (!std::isfinite(sum)) throw RangeError("magnitude exceeds model range", u);
      return sgn(u) * sum;
    }
    case Kind::exponential_power: {
      if (s == 0.0) return 0.0;
      const auto& P = exp_;
      const double e = checked_exp(P.mu * std::pow(s, P.nu), u);
      const double h = (2.0 + P.alpha) * std::pow(s, 1.0 + P.alpha) +
                       P.mu * P.nu * std::pow(s, P.nu + 1.0 + P.alpha);
      return sgn(u) * P.lambda * e * h;
    }
    case Kind::exp2d: {
      const double x = 4.0 * std::numbers::pi * u * u;
      if (x > kMaxExponent) checked_exp(x, u);
      return 8.0 * std::numbers::pi * u * exp_minus_linear(x);
    }
    case Kind::custom:
      return custom_.fprime(u);
  }
  return 0.0;
}

double NonlinearityModel::fsecond(double u) const {
  const double s = std::abs(u);
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::power_sum: {
      double sum = 0.0;
      for (const auto& t : terms_)
        sum += t.lambda * t.p * (t.p - 1.0) * std::pow(s, t.p - 2.0);
      if (!std::isfinite(sum)) throw RangeError("magnitude exceeds model range", u);
      return sum;
    }
    case Kind::exponential_power: {
      const auto& P = exp_;
      const double e = checked_exp(P.mu * std::pow(s, P.nu), u);
      const double mn = P.mu * P.nu;
      double val = (2.0 + P.alpha) * (1.0 + P.alpha) * std::pow(s, P.alpha);
      if (mn > 0.0 && s > 0.0) {
        val += mn * (3.0 + 2.0 * P.alpha + P.nu) * std::pow(s, P.nu + P.alpha) +
               mn * mn * std::pow(s, 2.0 * P.nu + P.alpha);
      }
      return P.lambda * e * val;
    }
    case Kind::exp2d: {
      const double x = 4.0 * std::numbers::pi * u * u;
      if (x > kMaxExponent) checked_exp(x, u);
      return 8.0 * std::numbers::pi * exp_minus_linear(x) +
             64.0 * std::numbers::pi * std::numbers::pi * u * u * std::expm1(x);
    }
    case Kind::custom: {
      if (custom_.fsecond) return custom_.fsecond(u);
      const double h = 1e-6 * (1.0 + s);
      return (custom_.fprime(u + h) - custom_.fprime(u - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

double NonlinearityModel::g(double u) const { return u * fprime(u) - 2.0 * f(u); }

std::string NonlinearityModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::none:
      os << "none";
      break;
    case Kind::power_sum:
      os << "power_sum{";
      for (std::size_t i = 0; i < terms_.size(); ++i)
        os << (i ? "," : "") << "(" << terms_[i].lambda << "," << terms_[i].p << ")";
      os << "}";
      break;
    case Kind::exponential_power:
      os << "exponential_power(" << exp_.lambda << "," << exp_.mu << ","
         << exp_.nu << "," << exp_.alpha << ")";
      break;
    case Kind::exp2d:
      os << "exp2d";
      break;
    case Kind::custom:
      os << custom_.name;
      break;
  }
  os << " [" << to_string(sign_) << "]";
  return os.str();
}

C0Estimate estimate_C0(const NonlinearityModel& model, double lo, double hi,
                       int n_samples) {
  if (model.sign() != Sign::defocusing)
    throw std::invalid_argument("estimate_C0 requires a defocusing model");
  if (n_samples < 2 || !(hi > lo))
    throw std::invalid_argument("estimate_C0: need hi > lo and n_samples >= 2");
  C0Estimate out;
  for (int i = 0; i < n_samples; ++i) {
    const double u = lo + (hi - lo) * i / (n_samples - 1);
    const double fu = model.f(u);
    const double gu = model.g(u);
    if (gu < -1e-12 * (1.0 + std::abs(u * model.fprime(u)))) {
      out.ok = false;
      out.violations.push_back(u);
      continue;
    }
    const double den = u * u + gu;
    // f''(0) = 0 forces f/u^2 -> 0 at the origin.
    if (den <= 0.0) continue;
    const double ratio = fu / den;
    if (ratio > out.value) {
      out.value = ratio;
      out.argmax = u;
    }
  }
  return out;
}

}  // namespace kgdamp
