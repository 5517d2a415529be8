#pragma once

#include "vosa/harness.hpp"
#include "vosa/io.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vosa {

inline constexpr int kProtocolVersion = 1;
inline constexpr int kDefaultHoldTicks = 3;

struct ClientCommand {
  double axis_x = 0.0;  // clamped to [-1, 1] on parse
  double axis_y = 0.0;
  double z_axis = 0.0;
  ControlMode control_mode = ControlMode::xy;
  GripperCommand gripper = GripperCommand::none;
  std::optional<std::string> mode_select;
  std::uint64_t seq = 0;
};

/// Parses the body of a "cmd" frame. ParseError when malformed.
ClientCommand parse_command(const Json& j);
Json command_to_json(const ClientCommand& c);

/// xy mode drops the z axis and z mode drops the stick.
Vec3 command_to_u_h(const ClientCommand& c);

/// Telemetry for one tick, built only from scene and controller state.
Json snapshot(const SceneState& scene, const ControllerState& cs, Outcome outcome, int tick);

/// One live episode. Commands are submitted at any time; each tick consumes
/// the newest one. A gripper event survives being superseded by a newer
/// command without one, so clicks between ticks are not lost.
class Session {
public:
  Session(ScenarioSpec spec, const std::string& mode, std::uint64_t seed, int hold_ticks = kDefaultHoldTicks);

  /// False (and ignored) for a seq at or below the newest one seen.
  bool submit(const ClientCommand& cmd);
  /// Next tick uses zero input, as after a rejected frame.
  void submit_zero();

  /// Advances one dt unless the episode is over; returns the snapshot.
  Json tick();

  bool finished() const { return runner_->finished(); }
  const EpisodeRunner& runner() const { return *runner_; }
  const EpisodeLog& log() const { return runner_->log(); }
  const std::string& mode() const { return mode_; }

  /// Logs of episodes ended early by a mode switch.
  std::vector<EpisodeLog> take_abandoned();

private:
  ScenarioSpec spec_;
  std::string mode_;
  std::uint64_t seed_;
  int hold_ticks_;
  std::unique_ptr<EpisodeRunner> runner_;
  std::optional<ClientCommand> pending_;
  std::optional<std::uint64_t> last_seq_;
  bool force_zero_ = false;
  Vec3 held_ = Vec3::Zero();
  int ticks_without_command_ = 0;
  std::vector<EpisodeLog> abandoned_;
};

/// session_tick(session, latest_cmd): submit, then tick.
Json session_tick(Session& session, const std::optional<ClientCommand>& latest);

/// Scenarios a server offers: the built-ins plus every *.json file in a directory.
class ScenarioCatalog {
public:
  ScenarioCatalog() = default;
  explicit ScenarioCatalog(const std::string& dir);

  std::vector<std::string> names() const;
  const ScenarioSpec* find(const std::string& name) const;
  void add(ScenarioSpec spec);

private:
  std::map<std::string, ScenarioSpec> specs_;
};

/// Protocol state machine for one connection, independent of the transport.
/// Every returned string is one text frame to send.
class SessionEndpoint {
public:
  SessionEndpoint(std::shared_ptr<const ScenarioCatalog> catalog, std::optional<std::string> log_dir = std::nullopt,
                  int hold_ticks = kDefaultHoldTicks);
  ~SessionEndpoint();

  std::vector<std::string> on_open();
  std::vector<std::string> on_message(const std::string& text);
  /// A state frame when a session is running.
  std::optional<std::string> on_tick();
  /// Flushes the current log to log_dir, if configured.
  void on_close();

  bool active() const { return session_ != nullptr; }
  const Session* session() const { return session_.get(); }
  /// Paths of logs written so far.
  const std::vector<std::string>& written_logs() const { return written_; }

private:
  std::string error_frame(const std::string& code, const std::string& detail) const;
  void persist(const EpisodeLog& log);

  std::shared_ptr<const ScenarioCatalog> catalog_;
  std::optional<std::string> log_dir_;
  int hold_ticks_;
  std::unique_ptr<Session> session_;
  bool persisted_ = false;
  std::vector<std::string> written_;
};

}  // namespace vosa
