#pragma once

#include "vosa/harness.hpp"
#include "vosa/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vosa {

/// A human model with an empty plan; each scenario supplies its own.
struct HumanEntry {
  std::string label;
  HumanModel model;
};

struct BatchConfig {
  std::vector<ScenarioSpec> scenarios;
  std::vector<std::string> modes;
  std::vector<HumanEntry> humans;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;
  std::optional<std::string> log_dir;  // per-episode logs when set
};

/// {"scenarios": [name or path, ...], "modes": [...], "humans": [{"label", "kind", ...}],
///  "seeds": [...] or {"start": s, "count": n}, "jobs": n, "log_dir": path}
BatchConfig batch_from_json(const Json& j);
BatchConfig load_batch_file(const std::string& path);

struct EpisodeRow {
  std::string scenario;
  std::string mode;
  std::string human;
  std::uint64_t seed = 0;
  Metrics metrics;
  std::size_t legality_violations = 0;
};

struct CellSummary {
  std::string scenario;
  std::string mode;
  std::string human;
  int n = 0;
  double mean_time = 0.0;
  double se_time = 0.0;
  double mean_input = 0.0;
  double se_input = 0.0;
  double success_rate = 0.0;
};

struct BatchResult {
  std::vector<EpisodeRow> rows;  // scenario-major, then mode, human, seed
  std::vector<CellSummary> cells;
};

/// Runs every (scenario, mode, human, seed) episode, `jobs` at a time. The
/// result does not depend on `jobs`.
BatchResult run_batch(const BatchConfig& cfg);

std::vector<CellSummary> summarize(const std::vector<EpisodeRow>& rows);

void write_cells_csv(std::ostream& os, const std::vector<CellSummary>& cells);
void write_rows_csv(std::ostream& os, const std::vector<EpisodeRow>& rows);

}  // namespace vosa
