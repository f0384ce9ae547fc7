#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgdamp {

/// Thrown when an evaluator cannot represent f(u) in double precision.
class RangeError : public std::overflow_error {
 public:
  RangeError(const std::string& what, double u)
      : std::overflow_error(what), u_(u) {}
  double offending_value() const { return u_; }

 private:
  double u_;
};

enum class Sign { defocusing, focusing };

const char* to_string(Sign s);
Sign sign_from_string(const std::string& s);

struct PowerTerm {
  double lambda;
  double p;
};

/// f(u) = lambda * exp(mu |u|^nu) * |u|^(2 + alpha).
struct ExpPowerParams {
  double lambda = 1.0;
  double mu = 0.0;
  double nu = 2.0;
  double alpha = 0.0;
};

/// Closure triple used for user supplied and tabulated potentials.
struct CustomPotential {
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  std::function<double(double)> fsecond;
  std::string name = "custom";
};

/// Nonlinear energy density f together with the sign it enters the equation
/// with. Evaluators are pure and thread safe once constructed.
class NonlinearityModel {
 public:
  enum class Kind { none, power_sum, exponential_power, exp2d, custom };

  NonlinearityModel() = default;

  static NonlinearityModel none(Sign sign = Sign::defocusing);
  static NonlinearityModel power_sum(std::vector<PowerTerm> terms,
                                     Sign sign = Sign::defocusing);
  static NonlinearityModel exponential_power(ExpPowerParams params,
                                             Sign sign = Sign::defocusing);
  /// e^{4 pi u^2} - 1 - 4 pi u^2 - (4 pi u^2)^2 / 2
  static NonlinearityModel exp2d(Sign sign = Sign::defocusing);
  static NonlinearityModel custom(CustomPotential potential,
                                  Sign sign = Sign::defocusing);

  double f(double u) const;
  double fprime(double u) const;
  double fsecond(double u) const;
  /// u f'(u) - 2 f(u)
  double g(double u) const;

  Kind kind() const { return kind_; }
  Sign sign() const { return sign_; }
  /// +1 for defocusing, -1 for focusing.
  double sign_factor() const { return sign_ == Sign::defocusing ? 1.0 : -1.0; }
  void set_sign(Sign s) { sign_ = s; }

  const std::vector<PowerTerm>& terms() const { return terms_; }
  const ExpPowerParams& exp_params() const { return exp_; }

  std::optional<double> C0;
  std::optional<double> q_growth;

  std::string describe() const;

 private:
  Kind kind_ = Kind::none;
  Sign sign_ = Sign::defocusing;
  std::vector<PowerTerm> terms_;
  ExpPowerParams exp_;
  CustomPotential custom_;
};

struct C0Estimate {
  bool ok = true;
  double value = 0.0;
  double argmax = 0.0;
  std::vector<double> violations;  // sample points with g(u) < 0
};

/// sup f(u) / (u^2 + g(u)) over n uniform samples of [lo, hi].
C0Estimate estimate_C0(const NonlinearityModel& model, double lo, double hi,
                       int n_samples);

}  // namespace kgdamp
