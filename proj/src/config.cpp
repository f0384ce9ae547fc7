#include "kgdamp/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kgdamp/truncation.hpp"
#include "kgdamp/variational.hpp"

namespace kgdamp {

namespace {

std::string fmt_value(const json& v) { return v.dump(); }

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string prefix, LoadReport& rep,
               std::initializer_list<const char*> allowed)
      : j_(j.is_null() ? empty() : j), prefix_(std::move(prefix)), rep_(rep) {
    if (!j_.is_object()) throw ConfigError("field '" + label() + "' must be an object");
    for (const auto& [key, _] : j_.items()) {
      if (std::none_of(allowed.begin(), allowed.end(),
                       [&](const char* a) { return key == a; }))
        throw ConfigError("unknown field '" + field(key.c_str()) + "'");
    }
  }

  std::string field(const char* key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }
  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& sub(const char* key) const { return has(key) ? j_.at(key) : empty(); }

  double number(const char* key, double def) {
    if (!has(key)) {
      note_default(key, json(def));
      return def;
    }
    return as_number(key);
  }
  std::optional<double> opt_number(const char* key) const {
    if (!has(key)) return std::nullopt;
    return as_number(key);
  }
  int integer(const char* key, int def) {
    if (!has(key)) {
      note_default(key, json(def));
      return def;
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer())
      throw ConfigError("field '" + field(key) + "' must be an integer");
    return v.get<int>();
  }
  std::string string(const char* key, const std::string& def) {
    if (!has(key)) {
      note_default(key, json(def));
      return def;
    }
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError("field '" + field(key) + "' must be a string");
    return v.get<std::string>();
  }
  bool boolean(const char* key, bool def) {
    if (!has(key)) {
      note_default(key, json(def));
      return def;
    }
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError("field '" + field(key) + "' must be a boolean");
    return v.get<bool>();
  }
  void note_default(const char* key, const json& value) {
    rep_.defaults_applied.push_back(field(key) + " = " + fmt_value(value));
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  std::string label() const { return prefix_.empty() ? "<root>" : prefix_; }
  double as_number(const char* key) const {
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError("field '" + field(key) + "' must be a number");
    return v.get<double>();
  }

  const json& j_;
  std::string prefix_;
  LoadReport& rep_;
};

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ConfigError("field '" + field + "' " + rule);
}

}  // namespace

double RunConfig::S_cone() const {
  return diagnostics.S_cone ? *diagnostics.S_cone : std::max(1.0, 3.0 * damper.R);
}
double RunConfig::fit_t1() const {
  return diagnostics.fit_t1 ? *diagnostics.fit_t1 : 0.1 * time.T_final;
}
double RunConfig::fit_t2() const {
  return diagnostics.fit_t2 ? *diagnostics.fit_t2 : time.T_final;
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << origin << ": parse error at line " << line << ", column " << col << ": "
       << e.what();
    throw ConfigError(os.str());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

LoadedConfig load_config(const std::string& path) {
  return config_from_json(read_json_file(path));
}

NonlinearityConfig nonlinearity_from_json(const json& j, const std::string& prefix,
                                          LoadReport& rep) {
  ObjectReader r(j, prefix, rep,
                 {"kind", "terms", "lambda", "mu", "nu", "alpha", "C0", "q_growth",
                  "truncation"});
  NonlinearityConfig nc;
  nc.kind = r.string("kind", nc.kind);
  if (nc.kind != "none" && nc.kind != "power_sum" && nc.kind != "exponential_power" &&
      nc.kind != "exp2d")
    throw ConfigError("field '" + r.field("kind") + "' must be one of none, power_sum, "
                      "exponential_power, exp2d (got '" + nc.kind + "')");
  if (nc.kind == "power_sum") {
    if (r.has("terms")) {
      const json& terms = r.sub("terms");
      require(terms.is_array() && !terms.empty(), r.field("terms"), "must be a non-empty array");
      nc.terms.clear();
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string tp = r.field("terms") + "[" + std::to_string(i) + "]";
        ObjectReader tr(terms[i], tp, rep, {"lambda", "p"});
        require(tr.has("lambda") && tr.has("p"), tp, "needs both lambda and p");
        PowerTerm t{tr.number("lambda", 0.0), tr.number("p", 0.0)};
        require(t.lambda > 0.0, tr.field("lambda"), "must be > 0");
        require(t.p > 2.0, tr.field("p"), "must be > 2");
        nc.terms.push_back(t);
      }
    } else {
      r.note_default("terms", json::array({{{"lambda", 1.0}, {"p", 4.0}}}));
    }
  } else {
    for (const char* k : {"terms"})
      require(!r.has(k), r.field(k), "only applies to kind power_sum");
  }
  if (nc.kind == "exponential_power") {
    nc.exp.lambda = r.number("lambda", 1.0);
    nc.exp.mu = r.number("mu", 1.0);
    nc.exp.nu = r.number("nu", 2.0);
    nc.exp.alpha = r.number("alpha", 0.0);
    require(nc.exp.lambda >= 0.0, r.field("lambda"), "must be >= 0");
    require(nc.exp.mu >= 0.0, r.field("mu"), "must be >= 0");
    require(nc.exp.nu >= 0.0, r.field("nu"), "must be >= 0");
    require(nc.exp.alpha >= 0.0, r.field("alpha"), "must be >= 0");
    require(nc.exp.alpha > 0.0 || nc.exp.mu > 0.0, r.field("alpha"),
            "must be > 0 when mu = 0 (f would be quadratic)");
  } else {
    for (const char* k : {"lambda", "mu", "nu", "alpha"})
      require(!r.has(k), r.field(k), "only applies to kind exponential_power");
  }
  nc.C0 = r.opt_number("C0");
  if (nc.C0) require(*nc.C0 >= 0.0, r.field("C0"), "must be >= 0");
  nc.q_growth = r.opt_number("q_growth");
  if (nc.q_growth) require(*nc.q_growth >= 2.0, r.field("q_growth"), "must be >= 2");
  if (r.has("truncation")) {
    ObjectReader tr(r.sub("truncation"), r.field("truncation"), rep, {"theta", "k", "l"});
    TruncationConfig t;
    t.theta = tr.number("theta", 0.5);
    require(tr.has("k"), tr.field("k"), "is required");
    t.k = tr.number("k", 1.0);
    t.l = tr.opt_number("l");
    require(t.theta > 0.0 && t.theta < 1.0, tr.field("theta"), "must lie in (0, 1)");
    require(t.k > 0.0, tr.field("k"), "must be > 0");
    if (t.l) require(*t.l > t.k, tr.field("l"), "must be > k");
    nc.truncation = t;
  }
  return nc;
}

LoadedConfig config_from_json(const json& j) {
  LoadedConfig out;
  LoadReport& rep = out.report;
  RunConfig& c = out.config;
  ObjectReader root(j, "", rep,
                    {"geometry", "damper", "nonlinearity", "mode", "initial_data", "time",
                     "scheme", "diagnostics", "outputs", "variational"});

  {
    ObjectReader r(root.sub("geometry"), "geometry", rep, {"N", "L", "dr", "r_inner"});
    c.geometry.N = r.integer("N", 1);
    c.geometry.L = r.number("L", 40.0);
    c.geometry.dr = r.number("dr", 0.05);
    c.geometry.r_inner = r.number("r_inner", 0.0);
    require(c.geometry.N >= 1 && c.geometry.N <= 3, "geometry.N", "must be 1, 2 or 3");
    require(c.geometry.L > 0.0, "geometry.L", "must be > 0");
    require(c.geometry.dr > 0.0, "geometry.dr", "must be > 0");
    require(c.geometry.r_inner >= 0.0 && c.geometry.r_inner < c.geometry.L,
            "geometry.r_inner", "must lie in [0, L)");
  }
  {
    ObjectReader r(root.sub("damper"), "damper", rep, {"M", "R", "a0", "shape", "width"});
    c.damper.M = r.number("M", 1.0);
    c.damper.R = r.number("R", 5.0);
    c.damper.a0 = r.number("a0", 1.0);
    try {
      c.damper.shape = damper_shape_from_string(r.string("shape", "smoothstep"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("field 'damper.shape': " + std::string(e.what()));
    }
    c.damper.width = r.number("width", 1.0);
    require(c.damper.M >= 0.0, "damper.M", "must be >= 0");
    require(c.damper.R >= 0.0, "damper.R", "must be >= 0");
    require(c.damper.a0 >= 0.0, "damper.a0", "must be >= 0");
    require(c.damper.a0 <= c.damper.M, "damper.a0", "must not exceed damper.M");
    require(c.damper.width > 0.0, "damper.width", "must be > 0");
  }
  c.nonlinearity = nonlinearity_from_json(root.sub("nonlinearity"), "nonlinearity", rep);
  {
    std::string mode = "defocusing";
    if (root.has("mode")) {
      require(root.sub("mode").is_string(), "mode", "must be a string");
      mode = root.sub("mode").get<std::string>();
    } else {
      root.note_default("mode", json(mode));
    }
    require(mode == "defocusing" || mode == "focusing", "mode",
            "must be 'defocusing' or 'focusing'");
    c.mode = sign_from_string(mode);
  }
  {
    ObjectReader r(root.sub("initial_data"), "initial_data", rep,
                   {"kind", "amplitude", "center", "width", "velocity_amplitude", "kappa"});
    auto& d = c.initial_data;
    d.kind = r.string("kind", "gaussian");
    require(d.kind == "gaussian" || d.kind == "bump" || d.kind == "ground_state_multiple" ||
                d.kind == "eigenmode",
            "initial_data.kind",
            "must be one of gaussian, bump, ground_state_multiple, eigenmode");
    if (d.kind == "ground_state_multiple") {
      d.kappa = r.number("kappa", 1.0);
      for (const char* k : {"amplitude", "center", "width"})
        require(!r.has(k), r.field(k), "does not apply to ground_state_multiple");
    } else {
      require(!r.has("kappa"), "initial_data.kappa", "only applies to ground_state_multiple");
      d.amplitude = r.number("amplitude", 0.5);
      if (d.kind != "eigenmode") {
        d.center = r.number("center", 0.0);
        d.width = r.number("width", 1.0);
        require(d.width > 0.0, "initial_data.width", "must be > 0");
      }
    }
    d.velocity_amplitude = r.number("velocity_amplitude", 0.0);
  }
  {
    ObjectReader r(root.sub("time"), "time", rep, {"dt", "T_final", "sample_stride"});
    c.time.dt = r.number("dt", 0.04);
    c.time.T_final = r.number("T_final", 10.0);
    c.time.sample_stride = r.integer("sample_stride", 1);
    require(c.time.dt > 0.0, "time.dt", "must be > 0");
    require(c.time.T_final >= 0.0, "time.T_final", "must be >= 0");
    require(c.time.sample_stride >= 1, "time.sample_stride", "must be >= 1");
  }
  {
    ObjectReader r(root.sub("scheme"), "scheme", rep,
                   {"kind", "newton_tol", "newton_max_iter", "sv_epsilon",
                    "blowup_threshold"});
    try {
      c.scheme.scheme = scheme_from_string(r.string("kind", "conservative"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("field 'scheme.kind': " + std::string(e.what()));
    }
    c.scheme.newton_tol = r.number("newton_tol", 1e-12);
    c.scheme.newton_max_iter = r.integer("newton_max_iter", 50);
    c.scheme.sv_epsilon = r.number("sv_epsilon", 1e-10);
    c.scheme.blowup_threshold = r.number("blowup_threshold", 1e6);
    c.scheme.dt = c.time.dt;
    require(c.scheme.newton_tol > 0.0, "scheme.newton_tol", "must be > 0");
    require(c.scheme.newton_max_iter >= 1, "scheme.newton_max_iter", "must be >= 1");
    require(c.scheme.sv_epsilon >= 0.0, "scheme.sv_epsilon", "must be >= 0");
    require(c.scheme.blowup_threshold > 0.0, "scheme.blowup_threshold", "must be > 0");
  }
  {
    ObjectReader r(root.sub("diagnostics"), "diagnostics", rep,
                   {"S_cone", "p_sobolev", "chi_R", "fit_window"});
    auto& d = c.diagnostics;
    d.S_cone = r.opt_number("S_cone");
    if (!d.S_cone) r.note_default("S_cone", json(c.S_cone()));
    d.p_sobolev = r.number("p_sobolev", 2.0 + 4.0 / c.geometry.N);
    d.chi_R = r.number("chi_R", 1.0);
    if (r.has("fit_window")) {
      const json& w = r.sub("fit_window");
      require(w.is_array() && w.size() == 2 && w[0].is_number() && w[1].is_number(),
              "diagnostics.fit_window", "must be [t1, t2]");
      d.fit_t1 = w[0].get<double>();
      d.fit_t2 = w[1].get<double>();
      require(*d.fit_t1 < *d.fit_t2, "diagnostics.fit_window", "needs t1 < t2");
    } else {
      r.note_default("fit_window", json::array({c.fit_t1(), c.fit_t2()}));
    }
    if (d.S_cone) require(*d.S_cone > 0.0, "diagnostics.S_cone", "must be > 0");
    require(d.chi_R > 0.0, "diagnostics.chi_R", "must be > 0");
  }
  {
    ObjectReader r(root.sub("outputs"), "outputs", rep,
                   {"csv_path", "summary_path", "snapshot_stride"});
    c.outputs.csv_path = r.string("csv_path", "diagnostics.csv");
    c.outputs.summary_path = r.string("summary_path", "summary.json");
    c.outputs.snapshot_stride = r.integer("snapshot_stride", 0);
    require(c.outputs.snapshot_stride >= 0, "outputs.snapshot_stride", "must be >= 0");
  }
  {
    ObjectReader r(root.sub("variational"), "variational", rep, {"c", "m"});
    c.variational.c = r.number("c", 1.0);
    c.variational.m = r.opt_number("m");
    require(c.variational.c > 0.0, "variational.c", "must be > 0");
    if (c.variational.m) require(*c.variational.m > 0.0, "variational.m", "must be > 0");
  }

  // Cross-field rules.
  const int N = c.geometry.N;
  const auto [p_lo, p_hi] = sobolev_range(N);
  if (c.diagnostics.p_sobolev < p_lo - 1e-12)
    throw ConfigError("field 'diagnostics.p_sobolev': p below 2+4/N");
  if (c.diagnostics.p_sobolev > p_hi + 1e-12)
    throw ConfigError("field 'diagnostics.p_sobolev': p above 2N/(N-2)");
  {
    const double limit = c.scheme.scheme == Scheme::conservative ? 1.0 : 0.9;
    if (c.time.dt > limit * c.geometry.dr * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "CFL violation: time.dt = " << c.time.dt << " exceeds " << limit
         << " * geometry.dr = " << limit * c.geometry.dr;
      throw ConfigError(os.str());
    }
  }
  if (c.nonlinearity.truncation) {
    require(c.mode == Sign::defocusing, "nonlinearity.truncation",
            "requires defocusing mode");
    require(c.nonlinearity.truncation->theta < max_theta(N), "nonlinearity.truncation.theta",
            "must satisfy 2 + theta < 2N/(N-2)");
    require(c.nonlinearity.kind != "none", "nonlinearity.truncation",
            "needs a nonlinearity to truncate");
  }
  if (c.initial_data.kind == "ground_state_multiple") {
    require(c.geometry.r_inner == 0.0, "initial_data.kind",
            "ground_state_multiple needs a grid without obstacle");
    require(c.nonlinearity.kind != "none", "initial_data.kind",
            "ground_state_multiple needs a nonlinearity");
  }
  if (c.diagnostics.fit_t2 && *c.diagnostics.fit_t2 > c.time.T_final + 1e-12)
    throw ConfigError("field 'diagnostics.fit_window': t2 exceeds time.T_final");
  if (c.initial_data.kind == "gaussian" || c.initial_data.kind == "bump") {
    const double support = std::abs(c.initial_data.center) +
                           (c.initial_data.kind == "bump" ? 1.0 : 4.0) * c.initial_data.width;
    if (c.time.T_final > c.geometry.L - support) {
      std::ostringstream os;
      os << "time.T_final = " << c.time.T_final << " exceeds L - support = "
         << c.geometry.L - support << "; waves reach the outer wall";
      rep.warnings.push_back(os.str());
    }
  }
  if (c.time.sample_stride * c.time.dt > 0.1 + 1e-12)
    rep.warnings.push_back("time.sample_stride * time.dt exceeds 0.1; cone integrals "
                           "are under-resolved in time");
  return out;
}

json to_json(const RunConfig& c) {
  json j;
  j["geometry"] = {{"N", c.geometry.N},
                   {"L", c.geometry.L},
                   {"dr", c.geometry.dr},
                   {"r_inner", c.geometry.r_inner}};
  j["damper"] = {{"M", c.damper.M},
                 {"R", c.damper.R},
                 {"a0", c.damper.a0},
                 {"shape", to_string(c.damper.shape)},
                 {"width", c.damper.width}};
  json nl = {{"kind", c.nonlinearity.kind}};
  if (c.nonlinearity.kind == "power_sum") {
    nl["terms"] = json::array();
    for (const auto& t : c.nonlinearity.terms)
      nl["terms"].push_back({{"lambda", t.lambda}, {"p", t.p}});
  }
  if (c.nonlinearity.kind == "exponential_power") {
    nl["lambda"] = c.nonlinearity.exp.lambda;
    nl["mu"] = c.nonlinearity.exp.mu;
    nl["nu"] = c.nonlinearity.exp.nu;
    nl["alpha"] = c.nonlinearity.exp.alpha;
  }
  if (c.nonlinearity.C0) nl["C0"] = *c.nonlinearity.C0;
  if (c.nonlinearity.q_growth) nl["q_growth"] = *c.nonlinearity.q_growth;
  if (c.nonlinearity.truncation) {
    const auto& t = *c.nonlinearity.truncation;
    nl["truncation"] = {{"theta", t.theta}, {"k", t.k}};
    if (t.l) nl["truncation"]["l"] = *t.l;
  }
  j["nonlinearity"] = nl;
  j["mode"] = to_string(c.mode);
  const auto& d = c.initial_data;
  j["initial_data"] = {{"kind", d.kind}, {"velocity_amplitude", d.velocity_amplitude}};
  if (d.kind == "ground_state_multiple") {
    j["initial_data"]["kappa"] = d.kappa;
  } else {
    j["initial_data"]["amplitude"] = d.amplitude;
    if (d.kind != "eigenmode") {
      j["initial_data"]["center"] = d.center;
      j["initial_data"]["width"] = d.width;
    }
  }
  j["time"] = {{"dt", c.time.dt},
               {"T_final", c.time.T_final},
               {"sample_stride", c.time.sample_stride}};
  j["scheme"] = {{"kind", to_string(c.scheme.scheme)},
                 {"newton_tol", c.scheme.newton_tol},
                 {"newton_max_iter", c.scheme.newton_max_iter},
                 {"sv_epsilon", c.scheme.sv_epsilon},
                 {"blowup_threshold", c.scheme.blowup_threshold}};
  j["diagnostics"] = {{"S_cone", c.S_cone()},
                      {"p_sobolev", c.diagnostics.p_sobolev},
                      {"chi_R", c.diagnostics.chi_R},
                      {"fit_window", {c.fit_t1(), c.fit_t2()}}};
  j["outputs"] = {{"csv_path", c.outputs.csv_path},
                  {"summary_path", c.outputs.summary_path},
                  {"snapshot_stride", c.outputs.snapshot_stride}};
  j["variational"] = {{"c", c.variational.c}};
  if (c.variational.m) j["variational"]["m"] = *c.variational.m;
  return j;
}

NonlinearityModel build_model(const NonlinearityConfig& nc, Sign mode) {
  NonlinearityModel m;
  if (nc.kind == "none") {
    m = NonlinearityModel::none(mode);
  } else if (nc.kind == "power_sum") {
    m = NonlinearityModel::power_sum(nc.terms, mode);
  } else if (nc.kind == "exponential_power") {
    m = NonlinearityModel::exponential_power(nc.exp, mode);
  } else if (nc.kind == "exp2d") {
    m = NonlinearityModel::exp2d(mode);
  } else {
    throw ConfigError("unknown nonlinearity kind '" + nc.kind + "'");
  }
  if (nc.truncation) {
    const auto& t = *nc.truncation;
    TruncatedModel tm = truncate_first(m, t.theta, t.k);
    if (t.l) tm = truncate_second(tm, *t.l);
    m = tm.as_model();
  }
  m.C0 = nc.C0;
  m.q_growth = nc.q_growth;
  return m;
}

Simulation build_simulation(const RunConfig& c) {
  Grid grid(c.geometry.N, c.geometry.L, c.geometry.dr, c.geometry.r_inner);
  DamperProfile damper(grid, c.damper.M, c.damper.R, c.damper.a0, c.damper.shape,
                       c.damper.width);
  NonlinearityModel model = build_model(c.nonlinearity, c.mode);
  SchemeConfig scheme = c.scheme;
  scheme.dt = c.time.dt;
  validate(scheme, grid);

  const std::size_t n = grid.size();
  std::vector<double> profile(n, 0.0);
  const auto& d = c.initial_data;
  if (d.kind == "gaussian" || d.kind == "bump") {
    for (std::size_t j = 0; j < n; ++j) {
      const double s = (grid.coord(j) - d.center) / d.width;
      if (d.kind == "gaussian") {
        profile[j] = std::exp(-s * s);
      } else if (std::abs(s) < 1.0) {
        profile[j] = std::exp(1.0 - 1.0 / (1.0 - s * s));
      }
    }
  } else if (d.kind == "eigenmode") {
    profile = first_dirichlet_eigenpair(grid).vector;
    const double peak = max_abs(profile);
    for (double& x : profile) x /= peak;
  } else {
    profile = shoot_ground_state(model, c.variational.c, grid).profile;
  }
  for (std::size_t j = 0; j < n; ++j)
    if (grid.is_dirichlet(j)) profile[j] = 0.0;

  const double scale = d.kind == "ground_state_multiple" ? d.kappa : d.amplitude;
  std::vector<double> u0(n), v0(n);
  for (std::size_t j = 0; j < n; ++j) {
    u0[j] = scale * profile[j];
    v0[j] = d.velocity_amplitude * profile[j];
  }

  DiagnosticsOptions opts;
  opts.S_cone = c.S_cone();
  opts.p_sobolev = c.diagnostics.p_sobolev;
  opts.chi_R = c.diagnostics.chi_R;

  return Simulation{std::move(grid), std::move(damper), std::move(model), scheme,
                    std::move(u0), std::move(v0), c.time.T_final, c.time.sample_stride,
                    c.outputs.snapshot_stride, opts};
}

SweepConfig sweep_from_json(const json& j, const std::string& base_dir) {
  LoadReport rep;
  ObjectReader r(j, "", rep, {"base", "base_path", "axes", "parallelism", "output_dir"});
  SweepConfig s;
  json base;
  if (r.has("base")) {
    base = r.sub("base");
  } else if (r.has("base_path")) {
    require(r.sub("base_path").is_string(), "base_path", "must be a string");
    std::filesystem::path p = r.sub("base_path").get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    base = read_json_file(p.string());
  } else {
    throw ConfigError("field 'base' is required (or 'base_path')");
  }
  s.base = base;
  s.full = to_json(config_from_json(base).config);
  if (!r.has("axes") || !r.sub("axes").is_array() || r.sub("axes").empty())
    throw ConfigError("no axes");
  const json& axes = r.sub("axes");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const std::string ap = "axes[" + std::to_string(i) + "]";
    ObjectReader ar(axes[i], ap, rep, {"path", "values"});
    SweepAxis axis;
    axis.path = ar.string("path", "");
    const json& vals = ar.sub("values");
    require(vals.is_array() && !vals.empty(), ap + ".values", "must be a non-empty array");
    json::json_pointer ptr;
    try {
      ptr = json::json_pointer(axis.path);
    } catch (const json::exception&) {
      throw ConfigError("field '" + ap + ".path': '" + axis.path + "' is not a JSON pointer");
    }
    if (axis.path.empty() || !s.full.contains(ptr))
      throw ConfigError("field '" + ap + ".path': '" + axis.path +
                        "' does not name a config field");
    for (const auto& v : vals) axis.values.push_back(v);
    s.axes.push_back(std::move(axis));
  }
  s.parallelism = r.integer("parallelism", 1);
  require(s.parallelism >= 1, "parallelism", "must be >= 1");
  s.output_dir = r.string("output_dir", "sweep");
  if (std::filesystem::path(s.output_dir).is_relative())
    s.output_dir = (std::filesystem::path(base_dir) / s.output_dir).string();
  return s;
}

json apply_axis_value(const SweepConfig& sweep, json cell, const std::string& path,
                      const json& value) {
  const json::json_pointer ptr(path);
  if (!cell.contains(ptr)) {
    const auto parent = ptr.parent_pointer();
    if (!cell.contains(parent)) cell[parent] = sweep.full.at(parent);
  }
  cell[ptr] = value;
  return cell;
}

SweepConfig load_sweep(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path();
  return sweep_from_json(read_json_file(path), dir.empty() ? "." : dir.string());
}

RateInputs rate_inputs_from_json(const json& j) {
  LoadReport rep;
  ObjectReader r(j, "", rep,
                 {"regime", "M", "R", "a0", "C0", "C_star", "N", "q_growth", "E0", "nu",
                  "C_script_N", "epsilon"});
  RateInputs in;
  try {
    in.regime = regime_from_string(r.string("regime", "condition_f"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("field 'regime': " + std::string(e.what()));
  }
  for (const char* k : {"M", "R", "a0", "C0"})
    require(r.has(k), k, "is required");
  in.M = r.number("M", 1.0);
  in.R = r.number("R", 1.0);
  in.a0 = r.number("a0", 1.0);
  in.C0 = r.number("C0", 0.0);
  in.C_star = r.number("C_star", 1.0);
  in.N = r.integer("N", 1);
  in.q_growth = r.opt_number("q_growth");
  in.E0 = r.opt_number("E0");
  in.nu = r.opt_number("nu");
  in.C_script_N = r.opt_number("C_script_N");
  in.epsilon = r.opt_number("epsilon");
  return in;
}

}  // namespace kgdamp
