#include "vosa/batch.hpp"
#include "vosa/error.hpp"
#include "vosa/harness.hpp"
#include "vosa/io.hpp"
#include "vosa/server.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

int run_cmd(const std::string& scenario, const std::string& mode, const std::string& human, std::uint64_t seed,
            const std::string& out)
{
  const vosa::ScenarioSpec spec = vosa::resolve_scenario(scenario);
  const vosa::EpisodeLog log = vosa::run_episode(spec, mode, vosa::make_human(spec, human), seed);
  if (!out.empty()) vosa::save_log(out, log);
  const vosa::Metrics m = vosa::compute_metrics(log);
  std::cout << "scenario=" << spec.name << " mode=" << mode << " human=" << human << " seed=" << seed
            << " outcome=" << vosa::to_string(log.outcome) << " time=" << m.completion_time
            << " input_magnitude=" << m.input_magnitude << " ticks=" << m.ticks << '\n';
  return 0;
}

int batch_cmd(const std::string& config, int jobs, const std::string& out, const std::string& rows_out)
{
  vosa::BatchConfig cfg = vosa::load_batch_file(config);
  if (jobs > 0) cfg.jobs = jobs;
  const vosa::BatchResult res = vosa::run_batch(cfg);
  if (out.empty()) {
    vosa::write_cells_csv(std::cout, res.cells);
  } else {
    std::ofstream f(out);
    if (!f) throw vosa::Error(vosa::ErrorCategory::io, "cannot write '" + out + "'");
    vosa::write_cells_csv(f, res.cells);
  }
  if (!rows_out.empty()) {
    std::ofstream f(rows_out);
    if (!f) throw vosa::Error(vosa::ErrorCategory::io, "cannot write '" + rows_out + "'");
    vosa::write_rows_csv(f, res.rows);
  }
  std::size_t violations = 0;
  for (const auto& r : res.rows) violations += r.legality_violations;
  if (violations > 0) std::cerr << "warning: " << violations << " state-machine violations\n";
  return 0;
}

int replay_cmd(const std::string& path)
{
  const vosa::EpisodeLog log = vosa::load_log(path);
  const vosa::ReplayResult res = vosa::replay(log);
  if (!res.identical)
    throw vosa::Error(vosa::ErrorCategory::replay_mismatch, "replay diverged at " + res.first_difference);
  std::cout << "replay identical: " << log.ticks.size() << " ticks, outcome " << vosa::to_string(log.outcome) << '\n';
  std::cout << vosa::to_json(res.replayed.final_scene).dump(2) << '\n';
  return 0;
}

int metrics_cmd(const std::string& path)
{
  const vosa::Metrics m = vosa::compute_metrics(vosa::load_log(path));
  std::cout << vosa::Json{{"success", m.success},
                          {"completion_time", m.completion_time},
                          {"input_magnitude", m.input_magnitude},
                          {"ticks", m.ticks}}
                   .dump()
            << '\n';
  return 0;
}

int scenario_cmd(const std::string& name)
{
  std::cout << vosa::to_json(vosa::resolve_scenario(name)).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Tabletop shared-autonomy simulator"};
  app.require_subcommand(1);

  std::string scenario, mode = "vosa", human = "compliant", out, config, log_path, rows_out;
  std::uint64_t seed = 0;
  int jobs = 0;

  auto* run = app.add_subcommand("run", "Run one episode");
  run->add_option("--scenario", scenario, "Built-in scenario name or scenario file")->required();
  run->add_option("--mode", mode, "teleop, sag or vosa")->check(CLI::IsMember({"teleop", "sag", "vosa"}));
  run->add_option("--human", human, "goal_directed, stubborn or compliant")
      ->check(CLI::IsMember({"goal_directed", "stubborn", "compliant"}));
  run->add_option("--seed", seed, "Episode seed");
  run->add_option("--out", out, "Write the episode log here");

  auto* batch = app.add_subcommand("batch", "Run an experiment grid");
  batch->add_option("--config", config, "Batch configuration file")->required();
  batch->add_option("--jobs", jobs, "Parallel episodes (overrides the config)")->check(CLI::PositiveNumber);
  batch->add_option("--out", out, "Summary CSV (default: stdout)");
  batch->add_option("--rows", rows_out, "Per-episode CSV");

  auto* rep = app.add_subcommand("replay", "Re-simulate a log and compare");
  rep->add_option("--log", log_path, "Episode log")->required();

  auto* met = app.add_subcommand("metrics", "Metrics of a stored log");
  met->add_option("--log", log_path, "Episode log")->required();

  auto* show = app.add_subcommand("scenario", "Print a scenario as JSON");
  show->add_option("--name", scenario, "Built-in scenario name or scenario file")->required();

  vosa::ServerOptions sopt;
  auto* serve = app.add_subcommand("serve", "Serve live sessions over websocket");
  serve->add_option("--port", sopt.port, "TCP port (0 picks a free one)");
  serve->add_option("--scenario-dir", sopt.scenario_dir, "Directory of scenario files")->required();
  serve->add_option("--static-dir", sopt.static_dir, "Directory served over plain HTTP");
  serve->add_option("--log-dir", sopt.log_dir, "Write a log per finished session here");
  serve->add_option("--address", sopt.address, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return run_cmd(scenario, mode, human, seed, out);
    if (*batch) return batch_cmd(config, jobs, out, rows_out);
    if (*rep) return replay_cmd(log_path);
    if (*met) return metrics_cmd(log_path);
    if (*show) return scenario_cmd(scenario);
    if (*serve) {
      vosa::Server server(sopt);
      std::cout << "listening on " << sopt.address << ":" << server.port() << std::endl;
      server.run();
      return 0;
    }
  } catch (const vosa::Error& e) {
    std::cerr << "error (" << vosa::to_string(e.category()) << "): " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
