#include "kgdamp/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace kgdamp {

Regime regime_from_string(const std::string& s) {
  if (s == "condition_f") return Regime::condition_f;
  if (s == "condition_f2") return Regime::condition_f2;
  if (s == "focusing") return Regime::focusing;
  throw std::invalid_argument("unknown regime '" + s + "'");
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::condition_f: return "condition_f";
    case Regime::condition_f2: return "condition_f2";
    case Regime::focusing: return "focusing";
  }
  return "?";
}

namespace {

double require(const std::optional<double>& v, const char* name, Regime r) {
  if (!v) throw std::invalid_argument(std::string("missing field '") + name +
                                      "' for regime " + to_string(r));
  return *v;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
}

}  // namespace

TheoreticalRate theoretical_rate(const RateInputs& in) {
  require_positive(in.M, "M");
  require_positive(in.R, "R");
  require_positive(in.a0, "a0");
  require_positive(in.C_star, "C_star");
  if (!(in.C0 >= 0.0)) throw std::invalid_argument("C0 must be >= 0");

  const double base = 1.0 + in.C0 + in.R * in.R;
  double logT = in.C_star * base;
  if (in.regime == Regime::condition_f2) {
    const double q = require(in.q_growth, "q_growth", in.regime);
    const double E0 = require(in.E0, "E0", in.regime);
    if (q < 2.0) throw std::invalid_argument("q_growth must be >= 2");
    if (!(E0 > 0.0)) throw std::invalid_argument("E0 must be > 0");
    logT = in.C_star * (base + in.C0 * std::pow(E0, 0.5 * q - 1.0));
  } else if (in.regime == Regime::focusing) {
    const double nu = require(in.nu, "nu", in.regime);
    const double CN = require(in.C_script_N, "C_script_N", in.regime);
    require(in.epsilon, "epsilon", in.regime);
    require(in.E0, "E0", in.regime);
    require_positive(nu, "nu");
    logT = in.C_star / nu * (1.0 + CN) * base;
  }

  TheoreticalRate out;
  out.T = std::exp(logT);
  out.delta = 0.5 / (1.0 + in.M * out.T + 1.0 / (in.a0 * in.R));
  if (in.regime == Regime::focusing) {
    require_positive(*in.E0, "E0");
    out.delta = std::min(out.delta, *in.epsilon / (in.M * out.T * *in.E0));
  }
  out.gamma = std::log1p(out.delta) / out.T;
  return out;
}

RateFit fit_decay_rate(std::span<const double> t, std::span<const double> E,
                       double t1, double t2) {
  if (!(t1 < t2)) throw std::invalid_argument("fit window requires t1 < t2");
  if (t.size() != E.size()) throw std::invalid_argument("fit: t and E differ in length");
  if (t.empty() || t1 < t.front() - 1e-9 || t2 > t.back() + 1e-9)
    throw std::out_of_range("fit window outside history");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t1 - 1e-12 || t[i] > t2 + 1e-12) continue;
    if (!(E[i] > 0.0)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "nonpositive energy sample E = %g at t = %g", E[i], t[i]);
      throw std::domain_error(buf);
    }
    xs.push_back(t[i]);
    ys.push_back(std::log(E[i]));
  }
  if (xs.size() < 10)
    throw std::invalid_argument("fit window too short: " + std::to_string(xs.size()) +
                                " samples (need 10)");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  const double slope = sxy / sxx;
  fit.gamma_fit = -slope;
  fit.intercept = my - slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.t1 = t1;
  fit.t2 = t2;
  fit.samples = static_cast<int>(xs.size());
  return fit;
}

RateFit fit_decay_rate(const RunHistory& history, double t1, double t2) {
  std::vector<double> t, E;
  t.reserve(history.records.size());
  E.reserve(history.records.size());
  for (const auto& r : history.records) {
    t.push_back(r.t);
    E.push_back(r.E);
  }
  return fit_decay_rate(t, E, t1, t2);
}

namespace {

double energy_at(const RunHistory& h, double T) {
  const auto& rec = h.records;
  if (rec.empty() || T < rec.front().t - 1e-12 || T > rec.back().t + 1e-12)
    throw std::out_of_range("T out of range of the history");
  for (std::size_t i = 1; i < rec.size(); ++i) {
    if (rec[i].t >= T) {
      const double s = (T - rec[i - 1].t) / (rec[i].t - rec[i - 1].t);
      return (1 - s) * rec[i - 1].E + s * rec[i].E;
    }
  }
  return rec.back().E;
}

}  // namespace

bool decrement_gate(const RunHistory& history, double T, double delta) {
  return decrement_gate_window(history, 0.0, T, delta);
}

bool decrement_gate_window(const RunHistory& history, double S, double T,
                           double delta) {
  if (history.records.empty() || S < history.records.front().t - 1e-12 ||
      S + T > history.t_final() + 1e-12)
    throw std::out_of_range("T out of range of the history");
  const double A = decrement(history, S + T) - decrement(history, S);
  return A >= delta * energy_at(history, S + T);
}

}  // namespace kgdamp
