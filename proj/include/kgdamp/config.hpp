#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgdamp/grid.hpp"
#include "kgdamp/nonlinearity.hpp"
#include "kgdamp/rates.hpp"
#include "kgdamp/simulation.hpp"
#include "kgdamp/stepper.hpp"

namespace kgdamp {

using json = nlohmann::json;

/// Malformed input, schema violation, or a violated cross-field rule.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeometryConfig {
  int N = 1;
  double L = 40.0;
  double dr = 0.05;
  double r_inner = 0.0;
};

struct DamperConfig {
  double M = 1.0;
  double R = 5.0;
  double a0 = 1.0;
  DamperShape shape = DamperShape::smoothstep;
  double width = 1.0;
};

struct TruncationConfig {
  double theta = 0.5;
  double k = 1.0;
  std::optional<double> l;
};

struct NonlinearityConfig {
  std::string kind = "power_sum";  // none | power_sum | exponential_power | exp2d
  std::vector<PowerTerm> terms{{1.0, 4.0}};
  ExpPowerParams exp;
  std::optional<double> C0;
  std::optional<double> q_growth;
  std::optional<TruncationConfig> truncation;
};

struct InitialDataConfig {
  std::string kind = "gaussian";  // gaussian | bump | ground_state_multiple | eigenmode
  double amplitude = 0.5;
  double center = 0.0;
  double width = 1.0;
  double velocity_amplitude = 0.0;
  double kappa = 1.0;  // ground_state_multiple
};

struct TimeConfig {
  double dt = 0.04;
  double T_final = 10.0;
  int sample_stride = 1;
};

struct DiagnosticsConfig {
  std::optional<double> S_cone;  // default max(1, 3R)
  double p_sobolev = 0.0;        // 0 -> 2 + 4/N
  double chi_R = 1.0;
  std::optional<double> fit_t1;  // default 0.1 T_final
  std::optional<double> fit_t2;  // default T_final
};

struct OutputsConfig {
  std::string csv_path = "diagnostics.csv";
  std::string summary_path = "summary.json";
  int snapshot_stride = 0;
};

struct VariationalConfig {
  double c = 1.0;
  std::optional<double> m;  // threshold supplied by the user instead of shooting
};

struct RunConfig {
  GeometryConfig geometry;
  DamperConfig damper;
  NonlinearityConfig nonlinearity;
  Sign mode = Sign::defocusing;
  InitialDataConfig initial_data;
  TimeConfig time;
  SchemeConfig scheme;
  DiagnosticsConfig diagnostics;
  OutputsConfig outputs;
  VariationalConfig variational;

  double S_cone() const;
  double fit_t1() const;
  double fit_t2() const;
};

struct LoadReport {
  std::vector<std::string> defaults_applied;
  std::vector<std::string> warnings;
};

struct LoadedConfig {
  RunConfig config;
  LoadReport report;
};

/// Parses JSON text; syntax errors report line and column.
json parse_json_text(const std::string& text, const std::string& origin = "<input>");
json read_json_file(const std::string& path);

LoadedConfig load_config(const std::string& path);
LoadedConfig config_from_json(const json& j);
/// Fully populated JSON form of a config (every field present).
json to_json(const RunConfig& c);

NonlinearityConfig nonlinearity_from_json(const json& j, const std::string& prefix,
                                          LoadReport& report);
NonlinearityModel build_model(const NonlinearityConfig& nc, Sign mode);

/// Grid, damper, model, scheme and initial data ready for run().
Simulation build_simulation(const RunConfig& c);

struct SweepAxis {
  std::string path;  // JSON pointer into the run config
  std::vector<json> values;
};

struct SweepConfig {
  json base;  // run config as written by the user
  json full;  // same with every default materialized; axis paths are checked here
  std::vector<SweepAxis> axes;
  int parallelism = 1;
  std::string output_dir = "sweep";
};

/// Base config with value written at the axis path.
json apply_axis_value(const SweepConfig& sweep, json cell, const std::string& path,
                      const json& value);

SweepConfig load_sweep(const std::string& path);
SweepConfig sweep_from_json(const json& j, const std::string& base_dir = ".");

RateInputs rate_inputs_from_json(const json& j);

}  // namespace kgdamp
