#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "kgdamp/config.hpp"
#include "kgdamp/diagnostics.hpp"

namespace kgdamp {

inline constexpr const char* kCsvVersionLine = "# kg-damp v1";
inline constexpr const char* kCsvHeader =
    "t,E,E_F,A_cum,K,J,pair_vu,max_u,l2_u,mor_grad,mor_g,mor_damp,ws_lhs";

/// Diagnostics series in the versioned CSV format (%.17g values).
std::string history_csv(const RunHistory& history);
/// Field snapshots as rows t, r, u, v.
std::string snapshots_csv(const RunHistory& history, const Grid& grid);
/// <csv stem>_snapshots.csv next to the diagnostics CSV.
std::string snapshot_path(const std::string& csv_path);
void write_text_file(const std::string& path, const std::string& text);

struct RunOutcome {
  RunHistory history;
  json summary;
  int exit_code = 0;  // 0 ok, 2 blowup
};

/// Runs a config and builds the summary without touching the filesystem.
RunOutcome execute(const RunConfig& config);

/// execute() plus CSV and summary files; returns the exit status.
int cmd_run(const RunConfig& config, std::ostream& log);
int cmd_sweep(const SweepConfig& sweep, std::ostream& log);
/// Prints {T, delta, gamma, regime}.
int cmd_rate(const json& inputs, std::ostream& out);

/// Accepts a bare nonlinearity block or {"nonlinearity": {...}, "geometry":
/// {...}, "c": ...}. Writes the (r, Q) profile CSV and prints
/// {c, m, Q0, residual}.
int cmd_ground_state(const json& model, const std::string& csv_path, std::ostream& out);

/// Table z, f, f_k, f_kl, f', f_k', f_kl' on n points of [0, z_max].
std::string truncation_csv(const json& model, double theta, double k,
                           std::optional<double> l, double z_max, int n);

/// Worker cap from KG_DAMP_THREADS (0 when unset or invalid).
int thread_cap_from_env();

}  // namespace kgdamp
