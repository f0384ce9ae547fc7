#include "kgdamp/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kgdamp/quadrature.hpp"

namespace kgdamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fritsch-Carlson limited Hermite interpolation on [x0, x1] using the given
// end slopes, returns value at x.
double monotone_hermite(double x0, double x1, double y0, double y1, double d0,
                        double d1, double x) {
  const double h = x1 - x0;
  const double delta = (y1 - y0) / h;
  if (delta == 0.0) {
    d0 = 0.0;
    d1 = 0.0;
  } else {
    double a = d0 / delta;
    double b = d1 / delta;
    if (a < 0.0) { d0 = 0.0; a = 0.0; }
    if (b < 0.0) { d1 = 0.0; b = 0.0; }
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      d0 = tau * a * delta;
      d1 = tau * b * delta;
    }
  }
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

}  // namespace

double max_theta(int N) {
  if (N <= 2) return 1.0;
  return std::min(1.0, 2.0 * N / (N - 2.0) - 2.0);
}

TruncatedModel::TruncatedModel(NonlinearityModel base, double theta, double k,
                               std::optional<double> l, TruncationOptions opts)
    : base_(std::move(base)), theta_(theta), k_(k), l_(l) {
  if (base_.sign() != Sign::defocusing)
    throw std::invalid_argument("truncation requires a defocusing model");
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("truncation: theta must lie in (0,1)");
  if (!(k > 0.0)) throw std::invalid_argument("truncation: k must be > 0");
  if (l && !(*l > k)) throw std::invalid_argument("truncation: l must exceed k");

  cap_ = base_zVprime(k_);
  if (!std::isfinite(cap_))
    throw RangeError("truncation: base model overflows at k", k_);

  z_end_ = l_ ? *l_ : k_ * opts.table_extent;
  const int n_dec = std::max(1, opts.points_per_decade);
  const double decades = std::log10(z_end_ / k_);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * n_dec)) + 1);
  log_dz_ = std::log(z_end_ / k_) / (n - 1);

  identity_ = true;
  table_.reserve(n);
  double V = base_.f(k_) / (k_ * k_);
  double z_prev = k_;
  for (int i = 0; i < n; ++i) {
    const double z = (i == n - 1) ? z_end_ : k_ * std::exp(log_dz_ * i);
    if (i > 0) {
      auto res = adaptive_gauss_kronrod(
          [this](double y) { return stage1_Vprime(y); }, z_prev, z,
          opts.quad_tol * (1.0 + std::abs(V)));
      if (!res.converged) {
        std::ostringstream os;
        os << "truncation: quadrature did not converge on [" << z_prev << ", "
           << z << "]";
        throw std::runtime_error(os.str());
      }
      V += res.value;
    }
    const double zv = base_zVprime(z);
    const double capped = cap_ * std::pow(z / k_, theta_);
    if (zv > capped * (1.0 + 1e-12)) identity_ = false;
    const double vp = std::min(zv, capped) / z;
    table_.push_back({z, vp, V, V * z * z, 2.0 * z * V + z * z * vp});
    z_prev = z;
  }

  if (l_) {
    Vk_l_ = table_.back().V;
    cap_l_ = *l_ * table_.back().Vprime;
  }
}

double TruncatedModel::base_zVprime(double z) const {
  // z V'(z) = g(z) / z^2
  try {
    const double v = base_.g(z) / (z * z);
    return std::isfinite(v) ? v : kInf;
  } catch (const RangeError&) {
    return kInf;
  }
}

double TruncatedModel::stage1_Vprime(double z) const {
  const double zv = base_zVprime(z);
  return std::min(zv, cap_ * std::pow(z / k_, theta_)) / z;
}

double TruncatedModel::stage1_V(double z) const {
  if (z >= z_end_) {
    if (z == z_end_) return table_.back().V;
    std::ostringstream os;
    os << "magnitude exceeds model range at u = " << z
       << " (truncation table ends at " << z_end_ << ")";
    throw RangeError(os.str(), z);
  }
  const double pos = std::log(z / k_) / log_dz_;
  std::size_t i = static_cast<std::size_t>(pos);
  if (i >= table_.size() - 1) i = table_.size() - 2;
  const auto& a = table_[i];
  const auto& b = table_[i + 1];
  return monotone_hermite(a.z, b.z, a.V, b.V, a.Vprime, b.Vprime, z);
}

double TruncatedModel::V(double z) const {
  const double s = std::abs(z);
  if (s <= k_) return s == 0.0 ? 0.0 : base_.f(s) / (s * s);
  if (identity_ && !l_) return base_.f(s) / (s * s);
  if (l_ && s > *l_)
    return Vk_l_ + cap_l_ / theta_ * (std::pow(s / *l_, theta_) - 1.0);
  return stage1_V(s);
}

double TruncatedModel::Vprime(double z) const {
  const double s = std::abs(z);
  double vp;
  if (s <= k_) {
    vp = s == 0.0 ? 0.0 : base_zVprime(s) / s;
  } else if (l_ && s > *l_) {
    vp = cap_l_ * std::pow(s / *l_, theta_) / s;
  } else {
    vp = stage1_Vprime(s);
  }
  return z < 0 ? -vp : vp;
}

double TruncatedModel::f(double z) const {
  const double s = std::abs(z);
  if (s <= k_ || (identity_ && !l_)) return base_.f(s);
  return V(s) * s * s;
}

double TruncatedModel::fprime(double z) const {
  const double s = std::abs(z);
  if (s <= k_ || (identity_ && !l_)) return base_.fprime(z);
  const double d = 2.0 * s * V(s) + s * s * Vprime(s);
  return z < 0 ? -d : d;
}

double TruncatedModel::fsecond(double z) const {
  const double s = std::abs(z);
  if (s <= k_ || (identity_ && !l_)) return base_.fsecond(z);
  const double h = 1e-6 * s;
  // V_k'' by central difference of the closed-form V_k'
  const double vpp = (Vprime(s + h) - Vprime(std::max(s - h, k_ * (1 + 1e-15)))) /
                     (s + h - std::max(s - h, k_ * (1 + 1e-15)));
  return 2.0 * V(s) + 4.0 * s * Vprime(s) + s * s * vpp;
}

NonlinearityModel TruncatedModel::as_model() const {
  auto self = std::make_shared<const TruncatedModel>(*this);
  CustomPotential p;
  p.f = [self](double u) { return self->f(u); };
  p.fprime = [self](double u) { return self->fprime(u); };
  p.fsecond = [self](double u) { return self->fsecond(u); };
  std::ostringstream os;
  os << "truncated(" << base_.describe() << ", theta=" << theta_ << ", k=" << k_;
  if (l_) os << ", l=" << *l_;
  os << ")";
  p.name = os.str();
  auto m = NonlinearityModel::custom(std::move(p), Sign::defocusing);
  m.C0 = base_.C0;
  m.q_growth = base_.q_growth;
  return m;
}

TruncatedModel truncate_first(const NonlinearityModel& base, double theta,
                              double k, TruncationOptions opts) {
  return TruncatedModel(base, theta, k, std::nullopt, opts);
}

TruncatedModel truncate_second(const TruncatedModel& first, double l,
                               TruncationOptions opts) {
  if (first.l())
    throw std::invalid_argument("truncate_second: model already has a second stage");
  return TruncatedModel(first.base(), first.theta(), first.k(), l, opts);
}

double lipschitz_ratio(const TruncatedModel& model, double zmax, int n) {
  std::vector<double> z(n), fp(n);
  for (int i = 0; i < n; ++i) {
    z[i] = -zmax + 2.0 * zmax * i / (n - 1);
    fp[i] = model.fprime(z[i]);
  }
  double sup = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double den =
          std::pow(std::abs(z[i]) + std::abs(z[j]), model.theta()) * std::abs(z[i] - z[j]);
      if (den <= 0.0) continue;
      sup = std::max(sup, std::abs(fp[i] - fp[j]) / den);
    }
  }
  return sup;
}

}  // namespace kgdamp
