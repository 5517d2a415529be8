#include "vosa/batch.hpp"

#include "vosa/error.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

namespace vosa {

BatchConfig batch_from_json(const Json& j)
{
  try {
    BatchConfig cfg;
    for (const auto& s : j.at("scenarios")) cfg.scenarios.push_back(resolve_scenario(s.get<std::string>()));
    for (const auto& m : j.at("modes")) cfg.modes.push_back(m.get<std::string>());
    for (const auto& h : j.at("humans")) {
      HumanEntry e;
      e.model = human_from_json(h, {});
      e.label = h.contains("label") ? h.at("label").get<std::string>() : kind_name(e.model.kind);
      cfg.humans.push_back(std::move(e));
    }
    const auto& seeds = j.at("seeds");
    if (seeds.is_array()) {
      for (const auto& s : seeds) cfg.seeds.push_back(s.get<std::uint64_t>());
    } else {
      const auto start = seeds.value("start", std::uint64_t{0});
      const auto count = seeds.at("count").get<std::uint64_t>();
      for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(start + i);
    }
    cfg.jobs = j.value("jobs", 1);
    if (j.contains("log_dir")) cfg.log_dir = j.at("log_dir").get<std::string>();
    if (cfg.scenarios.empty() || cfg.modes.empty() || cfg.humans.empty())
      throw ConfigError("batch needs at least one scenario, mode and human");
    if (cfg.seeds.empty()) throw ConfigError("batch needs at least one seed");
    if (cfg.jobs < 1) throw ConfigError("batch jobs must be >= 1");
    for (const auto& s : cfg.scenarios)
      for (const auto& m : cfg.modes) make_mode(s, m);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("batch config: ") + e.what());
  }
}

BatchConfig load_batch_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open batch config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("batch config '" + path + "': " + e.what());
  }
  // Relative scenario paths resolve against the config file.
  const auto base = std::filesystem::path(path).parent_path();
  for (auto& s : j["scenarios"]) {
    const auto name = s.get<std::string>();
    bool builtin = false;
    for (const auto& n : builtin_scenario_names()) builtin = builtin || n == name;
    if (!builtin && std::filesystem::path(name).is_relative()) s = (base / name).string();
  }
  return batch_from_json(j);
}

BatchResult run_batch(const BatchConfig& cfg)
{
  struct Job {
    std::size_t scenario, mode, human, seed;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < cfg.scenarios.size(); ++s)
    for (std::size_t m = 0; m < cfg.modes.size(); ++m)
      for (std::size_t h = 0; h < cfg.humans.size(); ++h)
        for (std::size_t k = 0; k < cfg.seeds.size(); ++k) jobs.push_back({s, m, h, k});

  if (cfg.log_dir) std::filesystem::create_directories(*cfg.log_dir);

  BatchResult res;
  res.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  std::string failed_cell;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard lock(err_mu);
        if (first_error) return;
      }
      const Job& jb = jobs[i];
      const ScenarioSpec& spec = cfg.scenarios[jb.scenario];
      const std::string& mode = cfg.modes[jb.mode];
      const HumanEntry& human = cfg.humans[jb.human];
      const std::uint64_t seed = cfg.seeds[jb.seed];
      EpisodeRow& row = res.rows[i];
      row.scenario = spec.name;
      row.mode = mode;
      row.human = human.label;
      row.seed = seed;
      try {
        const EpisodeLog log = run_episode(spec, mode, human.model, seed);
        row.metrics = compute_metrics(log);
        row.legality_violations = check_legality(log).size();
        if (cfg.log_dir) {
          const auto file = std::filesystem::path(*cfg.log_dir) /
                            (spec.name + "_" + mode + "_" + human.label + "_" + std::to_string(seed) + ".jsonl");
          save_log(file.string(), log);
        }
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) {
          first_error = std::current_exception();
          failed_cell = spec.name + "/" + mode + "/" + human.label + "/seed " + std::to_string(seed);
        }
        return;
      }
    }
  };

  const int n = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(jobs.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const Error& e) {
      throw Error(e.category(), "batch cell " + failed_cell + ": " + e.what());
    }
  }
  res.cells = summarize(res.rows);
  return res;
}

std::vector<CellSummary> summarize(const std::vector<EpisodeRow>& rows)
{
  std::vector<CellSummary> cells;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const EpisodeRow*>> groups;
  std::vector<std::tuple<std::string, std::string, std::string>> order;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.scenario, r.mode, r.human);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  auto mean_se = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return std::make_pair(mean, 0.0);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return std::make_pair(mean, sd / std::sqrt(static_cast<double>(v.size())));
  };
  for (const auto& key : order) {
    const auto& g = groups[key];
    CellSummary c;
    std::tie(c.scenario, c.mode, c.human) = key;
    c.n = static_cast<int>(g.size());
    std::vector<double> times, inputs;
    int wins = 0;
    for (const auto* r : g) {
      times.push_back(r->metrics.completion_time);
      inputs.push_back(r->metrics.input_magnitude);
      wins += r->metrics.success ? 1 : 0;
    }
    std::tie(c.mean_time, c.se_time) = mean_se(times);
    std::tie(c.mean_input, c.se_input) = mean_se(inputs);
    c.success_rate = static_cast<double>(wins) / c.n;
    cells.push_back(c);
  }
  return cells;
}

void write_cells_csv(std::ostream& os, const std::vector<CellSummary>& cells)
{
  os << "scenario,mode,human,n,mean_time,se_time,mean_input_magnitude,se_input_magnitude,success_rate\n";
  os << std::setprecision(10);
  for (const auto& c : cells)
    os << c.scenario << ',' << c.mode << ',' << c.human << ',' << c.n << ',' << c.mean_time << ',' << c.se_time << ','
       << c.mean_input << ',' << c.se_input << ',' << c.success_rate << '\n';
}

void write_rows_csv(std::ostream& os, const std::vector<EpisodeRow>& rows)
{
  os << "scenario,mode,human,seed,success,completion_time,input_magnitude,ticks\n";
  os << std::setprecision(10);
  for (const auto& r : rows)
    os << r.scenario << ',' << r.mode << ',' << r.human << ',' << r.seed << ',' << (r.metrics.success ? 1 : 0) << ','
       << r.metrics.completion_time << ',' << r.metrics.input_magnitude << ',' << r.metrics.ticks << '\n';
}

}  // namespace vosa
