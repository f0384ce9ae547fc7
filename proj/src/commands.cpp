#include "kgdamp/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "kgdamp/rates.hpp"
#include "kgdamp/simulation.hpp"
#include "kgdamp/truncation.hpp"
#include "kgdamp/variational.hpp"

namespace kgdamp {

namespace {

void append_g17(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

json number_or_null(std::optional<double> v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

}  // namespace

std::string history_csv(const RunHistory& h) {
  std::string out;
  out.reserve(64 + h.records.size() * 13 * 24);
  out += kCsvVersionLine;
  out += '\n';
  out += kCsvHeader;
  out += '\n';
  for (const auto& r : h.records) {
    const double cols[] = {r.t,     r.E,       r.E_F,      r.A_cum,   r.K,
                           r.J,     r.pair_vu, r.max_u,    r.l2_u,    r.mor_grad,
                           r.mor_g, r.mor_damp, r.ws_lhs};
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      if (i) out += ',';
      append_g17(out, cols[i]);
    }
    out += '\n';
  }
  return out;
}

std::string snapshots_csv(const RunHistory& h, const Grid& grid) {
  std::string out = "t,r,u,v\n";
  for (const auto& s : h.snapshots) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      for (double x : {s.t, grid.coord(j), s.u[j], s.v[j]}) {
        append_g17(out, x);
        out += ',';
      }
      out.back() = '\n';
    }
  }
  return out;
}

std::string snapshot_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  return (p.parent_path() / (p.stem().string() + "_snapshots.csv")).string();
}

void write_text_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

RunOutcome execute(const RunConfig& config) {
  const Simulation sim = build_simulation(config);
  RunOutcome out;
  json& s = out.summary;
  std::vector<std::string> warnings;

  std::optional<Classification> cls;
  std::string cls_error;
  if (config.mode == Sign::focusing) {
    try {
      double m;
      if (config.variational.m) {
        m = *config.variational.m;
      } else {
        m = shoot_ground_state(sim.model, config.variational.c, sim.grid).m;
      }
      cls = classify(sim.u0, sim.v0, sim.grid, sim.model, m);
      if (config.nonlinearity.kind == "exp2d" && !(cls->E_value < m && m <= 1.0))
        warnings.push_back("exp2d focusing run outside the regime E0 < m <= 1");
    } catch (const std::exception& e) {
      cls_error = e.what();
    }
  }

  out.history = run(sim);
  const RunHistory& h = out.history;
  for (const auto& w : h.warnings) warnings.push_back(w);

  s["E0"] = h.E0();
  s["E_final"] = h.E_final();
  s["t_final"] = h.t_final();
  s["rows"] = h.records.size();
  s["blowup"] = h.blowup;
  s["blowup_time"] = h.blowup ? json(h.blowup_time) : json(nullptr);
  if (h.blowup) s["blowup_message"] = h.blowup_message;

  double worst = 0.0;
  for (const auto& r : h.records) worst = std::max(worst, std::abs(r.E - h.E0() + 2.0 * r.A_cum));
  s["energy_identity_residual"] = worst;
  s["A_final"] = h.records.empty() ? 0.0 : h.records.back().A_cum;

  const double t1 = config.fit_t1();
  const double t2 = std::min(config.fit_t2(), h.t_final());
  s["fit_window"] = {t1, t2};
  try {
    const RateFit fit = fit_decay_rate(h, t1, t2);
    s["gamma_fit"] = fit.gamma_fit;
    s["r_squared"] = fit.r_squared;
  } catch (const std::exception& e) {
    s["gamma_fit"] = nullptr;
    s["r_squared"] = nullptr;
    s["fit_error"] = e.what();
  }

  const auto& last = h.records.back();
  s["S_cone"] = config.S_cone();
  s["mor_grad"] = last.mor_grad;
  s["mor_g"] = last.mor_g;
  s["mor_damp"] = last.mor_damp;
  s["morawetz_ratio"] =
      h.E0() > 0.0 ? json((last.mor_grad + last.mor_g) / h.E0()) : json(nullptr);
  try {
    s["ws_ratio"] = number_or_null(weighted_sobolev_ratio(
        h, config.S_cone(), h.t_final(), config.diagnostics.p_sobolev, h.E0()));
  } catch (const std::exception&) {
    s["ws_ratio"] = nullptr;
  }

  if (config.mode == Sign::focusing) {
    if (cls) {
      s["classification"] = {{"label", to_string(cls->label)},
                             {"E", cls->E_value},
                             {"K", cls->K_value},
                             {"m", cls->m_used}};
    } else {
      s["classification"] = {{"error", cls_error}};
    }
  }
  s["warnings"] = warnings;
  out.exit_code = h.blowup ? 2 : 0;
  return out;
}

int cmd_run(const RunConfig& config, std::ostream& log) {
  RunOutcome o = execute(config);
  write_text_file(config.outputs.csv_path, history_csv(o.history));
  write_text_file(config.outputs.summary_path, o.summary.dump(2) + "\n");
  if (!o.history.snapshots.empty()) {
    const std::string path = snapshot_path(config.outputs.csv_path);
    write_text_file(path, snapshots_csv(o.history, Grid(config.geometry.N, config.geometry.L,
                                                config.geometry.dr, config.geometry.r_inner)));
    log << "wrote " << path << "\n";
  }
  for (const auto& w : o.summary["warnings"]) log << "warning: " << w.get<std::string>() << "\n";
  log << "wrote " << config.outputs.csv_path << " (" << o.history.records.size()
      << " rows) and " << config.outputs.summary_path << "\n";
  if (o.history.blowup) log << "blowup: " << o.history.blowup_message << "\n";
  return o.exit_code;
}

int thread_cap_from_env() {
  const char* v = std::getenv("KG_DAMP_THREADS");
  if (!v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1) return 0;
  return static_cast<int>(n);
}

int cmd_sweep(const SweepConfig& sweep, std::ostream& log) {
  if (sweep.axes.empty()) throw ConfigError("no axes");
  std::size_t n_cells = 1;
  for (const auto& a : sweep.axes) n_cells *= a.values.size();

  struct Cell {
    std::vector<json> values;
    std::string status = "pending";
    int exit_code = 1;
    json summary;
  };
  std::vector<Cell> cells(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    std::size_t rem = i;
    for (std::size_t a = sweep.axes.size(); a-- > 0;) {
      const auto& vals = sweep.axes[a].values;
      cells[i].values.insert(cells[i].values.begin(), vals[rem % vals.size()]);
      rem /= vals.size();
    }
  }

  auto cell_dir = [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "cell_%04zu", i);
    return (std::filesystem::path(sweep.output_dir) / name).string();
  };

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n_cells; i = next++) {
      Cell& cell = cells[i];
      try {
        json cfg = sweep.base;
        for (std::size_t a = 0; a < sweep.axes.size(); ++a)
          cfg = apply_axis_value(sweep, std::move(cfg), sweep.axes[a].path, cell.values[a]);
        RunConfig rc = config_from_json(cfg).config;
        const std::string dir = cell_dir(i);
        rc.outputs.csv_path = dir + "/diagnostics.csv";
        rc.outputs.summary_path = dir + "/summary.json";
        RunOutcome o = execute(rc);
        write_text_file(rc.outputs.csv_path, history_csv(o.history));
        write_text_file(rc.outputs.summary_path, o.summary.dump(2) + "\n");
        cell.exit_code = o.exit_code;
        cell.status = o.exit_code == 2 ? "blowup" : "ok";
        cell.summary = std::move(o.summary);
      } catch (const std::exception& e) {
        cell.exit_code = 1;
        cell.status = std::string("error: ") + e.what();
      }
      std::lock_guard lock(log_mutex);
      log << cell_dir(i) << ": " << cell.status << "\n";
    }
  };

  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(sweep.parallelism), n_cells);
  if (const int cap = thread_cap_from_env(); cap > 0)
    workers = std::min<std::size_t>(workers, static_cast<std::size_t>(cap));
  workers = std::max<std::size_t>(workers, 1);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  auto field = [](const json& s, const char* key) -> std::string {
    if (!s.is_object() || !s.contains(key) || s[key].is_null()) return "";
    if (s[key].is_number()) {
      std::string out;
      append_g17(out, s[key].get<double>());
      return out;
    }
    return s[key].dump();
  };
  auto csv_escape = [](std::string v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char ch : v) {
      if (ch == '"') out += '"';
      out += ch;
    }
    return out + "\"";
  };

  std::string agg = "cell";
  for (const auto& a : sweep.axes) agg += "," + csv_escape(a.path);
  agg += ",status,exit_code,gamma_fit,r_squared,E0,E_final,mor_grad,mor_g,mor_damp,blowup\n";
  int failures = 0;
  for (std::size_t i = 0; i < n_cells; ++i) {
    const Cell& c = cells[i];
    if (c.exit_code == 1) ++failures;
    agg += std::to_string(i);
    for (const auto& v : c.values) agg += "," + csv_escape(v.dump());
    agg += "," + csv_escape(c.status) + "," + std::to_string(c.exit_code);
    for (const char* k : {"gamma_fit", "r_squared", "E0", "E_final", "mor_grad", "mor_g",
                          "mor_damp", "blowup"})
      agg += "," + field(c.summary, k);
    agg += "\n";
  }
  const std::string agg_path = (std::filesystem::path(sweep.output_dir) / "aggregate.csv").string();
  write_text_file(agg_path, agg);
  log << "wrote " << agg_path << " (" << n_cells << " cells, " << failures << " failed)\n";
  return failures ? 1 : 0;
}

int cmd_rate(const json& inputs, std::ostream& out) {
  const RateInputs in = rate_inputs_from_json(inputs);
  const TheoreticalRate r = theoretical_rate(in);
  json j = {{"T", r.T}, {"delta", r.delta}, {"gamma", r.gamma}, {"regime", to_string(in.regime)}};
  out << j.dump(2) << "\n";
  return 0;
}

namespace {

struct ModelSpec {
  NonlinearityModel model;
  GeometryConfig geometry;
  double c = 1.0;
};

ModelSpec model_spec(const json& j, Sign mode) {
  LoadReport rep;
  ModelSpec spec;
  if (j.is_object() && j.contains("nonlinearity")) {
    for (const auto& [key, _] : j.items())
      if (key != "nonlinearity" && key != "geometry" && key != "c")
        throw ConfigError("unknown field '" + key + "'");
    spec.model = build_model(nonlinearity_from_json(j["nonlinearity"], "nonlinearity", rep), mode);
    if (j.contains("geometry")) {
      json wrapper = {{"geometry", j["geometry"]}};
      spec.geometry = config_from_json(wrapper).config.geometry;
    }
    if (j.contains("c")) {
      if (!j["c"].is_number() || !(j["c"].get<double>() > 0.0))
        throw ConfigError("field 'c' must be a number > 0");
      spec.c = j["c"].get<double>();
    }
  } else {
    spec.model = build_model(nonlinearity_from_json(j, "", rep), mode);
  }
  return spec;
}

}  // namespace

int cmd_ground_state(const json& model_json, const std::string& csv_path, std::ostream& out) {
  const ModelSpec spec = model_spec(model_json, Sign::focusing);
  const Grid grid(spec.geometry.N, spec.geometry.L, spec.geometry.dr, spec.geometry.r_inner);
  const GroundState gs = shoot_ground_state(spec.model, spec.c, grid);
  std::string csv = "r,Q\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid.coord(j) < 0.0) continue;
    append_g17(csv, grid.coord(j));
    csv += ',';
    append_g17(csv, gs.profile[j]);
    csv += '\n';
  }
  write_text_file(csv_path, csv);
  json j = {{"c", gs.c},        {"m", gs.m},           {"Q0", gs.Q0},
            {"residual", gs.residual}, {"K", gs.K}, {"r_join", gs.r_join}};
  out << j.dump(2) << "\n";
  return 0;
}

std::string truncation_csv(const json& model_json, double theta, double k,
                           std::optional<double> l, double z_max, int n) {
  if (n < 2) throw std::invalid_argument("truncation table needs at least 2 points");
  if (!(z_max > 0.0)) throw std::invalid_argument("z_max must be > 0");
  const ModelSpec spec = model_spec(model_json, Sign::defocusing);
  const TruncatedModel first = truncate_first(spec.model, theta, k);
  const std::optional<TruncatedModel> second =
      l ? std::optional<TruncatedModel>(truncate_second(first, *l)) : std::nullopt;
  const TruncatedModel& kl = second ? *second : first;
  std::string csv = "z,f,f_k,f_kl,f',f_k',f_kl'\n";
  for (int i = 0; i < n; ++i) {
    const double z = z_max * i / (n - 1);
    double base_f, base_fp;
    try {
      base_f = spec.model.f(z);
      base_fp = spec.model.fprime(z);
    } catch (const RangeError&) {
      base_f = base_fp = std::numeric_limits<double>::infinity();
    }
    const double cols[] = {z, base_f, first.f(z), kl.f(z), base_fp, first.fprime(z), kl.fprime(z)};
    for (std::size_t c = 0; c < std::size(cols); ++c) {
      if (c) csv += ',';
      append_g17(csv, cols[c]);
    }
    csv += '\n';
  }
  return csv;
}

}  // namespace kgdamp
