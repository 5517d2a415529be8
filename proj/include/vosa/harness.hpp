#pragma once

#include "vosa/controller.hpp"
#include "vosa/human.hpp"
#include "vosa/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vosa {

struct TickRecord {
  int tick = 0;
  double t = 0.0;  // sim time at the start of the tick
  Phase phase = Phase::object_sensing;
  Phase next_phase = Phase::object_sensing;
  Vec3 position = Vec3::Zero();  // effector after the step
  Gripper gripper = Gripper::open;
  std::optional<std::string> attached;
  Vec3 u_in = Vec3::Zero();  // human input as received, before clamping
  GripperCommand human_gripper = GripperCommand::none;
  GripperCommand gripper_out = GripperCommand::none;
  BlendState blend;
  bool sensing_attempted = false;
  bool gate_open = false;
  PerceptionStatus perception = PerceptionStatus::unchanged;
  bool intents_updated = false;
  std::size_t intent_count = 0;
  std::uint64_t intents_hash = 0;
  std::vector<std::string> events;  // scene annotations from the step
};

enum class Outcome { running, success, timeout };
const char* to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

/// Where the human input came from. `recorded` logs replay their own inputs.
enum class InputSource { model, recorded };

struct EpisodeHeader {
  ScenarioSpec scenario;
  std::string mode;  // teleop, sag or vosa
  InputSource source = InputSource::model;
  std::optional<HumanModel> human;  // set for InputSource::model
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

struct EpisodeLog {
  EpisodeHeader header;
  std::vector<TickRecord> ticks;
  Outcome outcome = Outcome::running;
  SceneState final_scene;
};

/// Steps one episode. Shared by the batch runner, replay and live sessions
/// so that every path produces the same log for the same inputs.
class EpisodeRunner {
public:
  /// Validates the scenario (ConfigError) before any stepping.
  EpisodeRunner(ScenarioSpec spec, const std::string& mode, std::uint64_t seed, InputSource source,
                std::optional<HumanModel> human = std::nullopt);

  const TickRecord& step(const Vec3& u_h, GripperCommand gripper_cmd);

  bool finished() const { return log_.outcome != Outcome::running; }
  Outcome outcome() const { return log_.outcome; }
  const SceneState& scene() const { return scene_; }
  const ControllerState& controller() const { return controller_; }
  const ScenarioSpec& spec() const { return log_.header.scenario; }
  const EpisodeLog& log() const { return log_; }
  EpisodeLog take_log() { return std::move(log_); }
  int max_ticks() const { return max_ticks_; }

private:
  SceneState scene_;
  ControllerState controller_;
  Rng perception_rng_;
  EpisodeLog log_;
  int max_ticks_ = 0;
};

/// Derived streams, one per consumer, so that adding draws to one never
/// perturbs another.
enum RngStream : std::uint64_t { kStreamPerception = 1, kStreamHuman = 2 };

EpisodeLog run_episode(const ScenarioSpec& spec, const std::string& mode, const HumanModel& human,
                       std::uint64_t seed);

struct RecordedInput {
  Vec3 u_h = Vec3::Zero();
  GripperCommand gripper = GripperCommand::none;
};

/// Drives the episode from a fixed input sequence, stopping when the
/// episode ends or the inputs run out.
EpisodeLog run_recorded(const ScenarioSpec& spec, const std::string& mode, const std::vector<RecordedInput>& inputs,
                        std::uint64_t seed);

std::vector<RecordedInput> inputs_of(const EpisodeLog& log);

struct Metrics {
  double completion_time = 0.0;
  double input_magnitude = 0.0;
  bool success = false;
  int ticks = 0;
};

Metrics compute_metrics(const EpisodeLog& log);

/// Sum of |u_h| * dt over ticks [begin, end).
double input_magnitude(const EpisodeLog& log, std::size_t begin, std::size_t end);

/// Phase moves off the cycle, and (for VOSA) intent updates on ticks where
/// the camera gate was closed. Empty when the log is legal.
std::vector<std::string> check_legality(const EpisodeLog& log);

struct ReplayResult {
  bool identical = false;
  std::string first_difference;
  EpisodeLog replayed;
};

/// Re-simulates from the header (and recorded inputs when the log has them)
/// and compares every record and the final scene.
ReplayResult replay(const EpisodeLog& log);

std::uint64_t config_hash(const EpisodeHeader& header);

}  // namespace vosa
