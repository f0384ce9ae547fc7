#include "kgdamp/simulation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kgdamp {

double support_radius(const Grid& grid, std::span<const double> u0,
                      std::span<const double> v0, double rel_tol) {
  const double scale = std::max(max_abs(u0), max_abs(v0));
  if (scale == 0.0) return 0.0;
  double r = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (std::abs(u0[j]) > rel_tol * scale || std::abs(v0[j]) > rel_tol * scale)
      r = std::max(r, grid.radius(j));
  return r;
}

RunHistory run(const Simulation& sim) {
  if (!(sim.T_final >= 0.0)) throw std::invalid_argument("run: T_final must be >= 0");
  if (sim.sample_stride < 1) throw std::invalid_argument("run: sample_stride must be >= 1");
  const double dt = sim.scheme.dt;
  Stepper stepper(sim.grid, sim.damper, sim.model, sim.scheme);

  RunHistory h;
  h.N = sim.grid.dimension();
  h.sign = sim.model.sign();
  h.dt = dt;
  h.sample_stride = sim.sample_stride;
  h.options = sim.diagnostics;

  const long n_steps = static_cast<long>(std::floor(sim.T_final / dt + 1e-9));
  const long last_sample = (n_steps / sim.sample_stride) * sim.sample_stride;

  if (sim.sample_stride * dt > 0.1 + 1e-12) {
    std::ostringstream os;
    os << "sample_stride*dt = " << sim.sample_stride * dt
       << " exceeds 0.1; cone integrals are under-resolved in time";
    h.warnings.push_back(os.str());
  }
  const double support = support_radius(sim.grid, sim.u0, sim.v0);
  if (sim.T_final > sim.grid.outer_radius() - support) {
    std::ostringstream os;
    os << "T_final = " << sim.T_final << " exceeds L - support radius = "
       << sim.grid.outer_radius() - support
       << "; reflections from the outer wall may pollute decay measurements";
    h.warnings.push_back(os.str());
  }

  long n_snap = 0;
  auto maybe_snapshot = [&](double t, std::span<const double> u,
                            std::span<const double> v) {
    if (sim.snapshot_stride > 0 && n_snap++ % sim.snapshot_stride == 0)
      h.snapshots.push_back({t, {u.begin(), u.end()}, {v.begin(), v.end()}});
  };

  StepState st = stepper.start(sim.u0, sim.v0);
  {
    auto rec = sample_record(sim.grid, sim.damper, sim.model, 0.0, st.u_prev, sim.v0,
                             sim.diagnostics);
    rec.E = stepper.discrete_energy(st);
    rec.E_F = stepper.discrete_free_energy(st.u_prev, st.u_curr);
    rec.A_cum = 0.0;
    h.records.push_back(rec);
    maybe_snapshot(0.0, st.u_prev, sim.v0);
  }

  try {
    for (long k = 1; k <= last_sample; ++k) {
      stepper.step(st);  // st.u_prev is now level k
      if (k % sim.sample_stride != 0) continue;
      const double t = dt * static_cast<double>(k);
      const auto v = stepper.centered_velocity(st);
      auto rec = sample_record(sim.grid, sim.damper, sim.model, t, st.u_prev, v,
                               sim.diagnostics);
      rec.E = stepper.discrete_energy(st);
      rec.E_F = stepper.discrete_free_energy(st.u_prev, st.u_curr);
      rec.A_cum = st.A;
      h.records.push_back(rec);
      maybe_snapshot(t, st.u_prev, v);
    }
  } catch (const BlowupDetected& e) {
    h.blowup = true;
    h.blowup_time = e.time();
    h.blowup_message = e.what();
  }
  fill_cumulative_cone(h);
  return h;
}

}  // namespace kgdamp
