#include "vosa/session.hpp"

#include "vosa/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>

namespace vosa {

namespace {

double axis(const Json& v, const char* what)
{
  if (!v.is_number()) throw ParseError(std::string(what) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(std::string(what) + " must be finite");
  return std::clamp(x, -1.0, 1.0);
}

}  // namespace

ClientCommand parse_command(const Json& j)
{
  if (!j.is_object()) throw ParseError("command must be an object");
  ClientCommand c;
  try {
    if (j.contains("axes")) {
      const auto& a = j.at("axes");
      if (!a.is_array() || a.size() != 2) throw ParseError("axes must be [x, y]");
      c.axis_x = axis(a[0], "axes[0]");
      c.axis_y = axis(a[1], "axes[1]");
    }
    if (j.contains("z_axis")) c.z_axis = axis(j.at("z_axis"), "z_axis");
    if (j.contains("control_mode")) c.control_mode = control_mode_from_string(j.at("control_mode").get<std::string>());
    if (j.contains("gripper")) c.gripper = gripper_command_from_string(j.at("gripper").get<std::string>());
    if (j.contains("mode_select") && !j.at("mode_select").is_null()) {
      const auto m = j.at("mode_select").get<std::string>();
      if (m != "teleop" && m != "sag" && m != "vosa") throw ParseError("unknown mode_select '" + m + "'");
      c.mode_select = m;
    }
    if (!j.contains("seq") || !j.at("seq").is_number_unsigned()) throw ParseError("seq must be a non-negative integer");
    c.seq = j.at("seq").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("command: ") + e.what());
  }
  return c;
}

Json command_to_json(const ClientCommand& c)
{
  return {{"type", "cmd"},
          {"protocol_version", kProtocolVersion},
          {"axes", {c.axis_x, c.axis_y}},
          {"z_axis", c.z_axis},
          {"control_mode", to_string(c.control_mode)},
          {"gripper", to_string(c.gripper)},
          {"mode_select", c.mode_select ? Json(*c.mode_select) : Json(nullptr)},
          {"seq", c.seq}};
}

Vec3 command_to_u_h(const ClientCommand& c)
{
  if (c.control_mode == ControlMode::xy) return Vec3(c.axis_x, c.axis_y, 0.0);
  return Vec3(0.0, 0.0, c.z_axis);
}

Json snapshot(const SceneState& scene, const ControllerState& cs, Outcome outcome, int tick)
{
  const Json s = to_json(scene);
  const BlendState& b = cs.last_blend;
  Json intents = Json::array();
  for (const auto& g : cs.grasp_intents.intents) intents.push_back(vec_to_json(g));
  Json placement = Json::array();
  for (const auto& g : cs.config.placement_intents) placement.push_back(vec_to_json(g));

  Json family = nullptr;
  if (b.selected_intent) family = cs.phase == Phase::placing || cs.phase == Phase::active_sensing ? "placement" : "grasp";

  return {{"type", "state"},
          {"protocol_version", kProtocolVersion},
          {"tick", tick},
          {"t", scene.t},
          {"phase", to_string(cs.phase)},
          {"mode", mode_name(cs.mode)},
          {"outcome", to_string(outcome)},
          {"effector", s.at("effector")},
          {"objects", s.at("objects")},
          {"pedestals", s.at("pedestals")},
          {"intents", intents},
          {"placement_intents", placement},
          {"selected", b.selected_intent ? Json(*b.selected_intent) : Json(nullptr)},
          {"selected_family", family},
          {"c", std::isfinite(b.c) ? Json(b.c) : Json(nullptr)},
          {"alpha", b.alpha},
          {"u_h", vec_to_json(b.u_h)},
          {"u_r", vec_to_json(b.u_r)},
          {"u", vec_to_json(b.u)},
          {"gate", sensing_allowed(scene, cs.config.perception.camera)}};
}

Session::Session(ScenarioSpec spec, const std::string& mode, std::uint64_t seed, int hold_ticks)
    : spec_(std::move(spec)), mode_(mode), seed_(seed), hold_ticks_(hold_ticks)
{
  if (hold_ticks_ < 1) throw ConfigError("hold_ticks must be >= 1");
  runner_ = std::make_unique<EpisodeRunner>(spec_, mode_, seed_, InputSource::recorded);
}

bool Session::submit(const ClientCommand& cmd)
{
  if (last_seq_ && cmd.seq <= *last_seq_) return false;
  last_seq_ = cmd.seq;

  if (cmd.mode_select && *cmd.mode_select != mode_) {
    if (!runner_->log().ticks.empty()) abandoned_.push_back(runner_->take_log());
    mode_ = *cmd.mode_select;
    runner_ = std::make_unique<EpisodeRunner>(spec_, mode_, seed_, InputSource::recorded);
    pending_.reset();
    held_.setZero();
    ticks_without_command_ = 0;
  }

  ClientCommand next = cmd;
  if (pending_ && next.gripper == GripperCommand::none) next.gripper = pending_->gripper;
  pending_ = next;
  force_zero_ = false;
  return true;
}

void Session::submit_zero()
{
  pending_.reset();
  force_zero_ = true;
}

Json Session::tick()
{
  if (!finished()) {
    Vec3 u = Vec3::Zero();
    GripperCommand g = GripperCommand::none;
    if (force_zero_) {
      held_.setZero();
      ticks_without_command_ = 0;
      force_zero_ = false;
    } else if (pending_) {
      u = command_to_u_h(*pending_);
      g = pending_->gripper;
      held_ = u;
      ticks_without_command_ = 0;
      pending_.reset();
    } else {
      ++ticks_without_command_;
      if (ticks_without_command_ < hold_ticks_) u = held_;
      else held_.setZero();
    }
    runner_->step(u, g);
  }
  return snapshot(runner_->scene(), runner_->controller(), runner_->outcome(),
                  static_cast<int>(runner_->log().ticks.size()));
}

std::vector<EpisodeLog> Session::take_abandoned() { return std::exchange(abandoned_, {}); }

Json session_tick(Session& session, const std::optional<ClientCommand>& latest)
{
  if (latest) session.submit(*latest);
  return session.tick();
}

ScenarioCatalog::ScenarioCatalog(const std::string& dir)
{
  for (const auto& n : builtin_scenario_names()) add(builtin_scenario(n));
  if (!std::filesystem::is_directory(dir)) throw ConfigError("scenario directory '" + dir + "' does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) add(load_scenario_file(f.string()));
}

std::vector<std::string> ScenarioCatalog::names() const
{
  std::vector<std::string> out;
  for (const auto& [k, v] : specs_) out.push_back(k);
  return out;
}

const ScenarioSpec* ScenarioCatalog::find(const std::string& name) const
{
  auto it = specs_.find(name);
  return it == specs_.end() ? nullptr : &it->second;
}

void ScenarioCatalog::add(ScenarioSpec spec)
{
  validate(spec);
  const std::string name = spec.name;
  specs_[name] = std::move(spec);
}

SessionEndpoint::SessionEndpoint(std::shared_ptr<const ScenarioCatalog> catalog, std::optional<std::string> log_dir,
                                 int hold_ticks)
    : catalog_(std::move(catalog)), log_dir_(std::move(log_dir)), hold_ticks_(hold_ticks)
{
}

SessionEndpoint::~SessionEndpoint() = default;

std::string SessionEndpoint::error_frame(const std::string& code, const std::string& detail) const
{
  return Json{{"type", "error"}, {"protocol_version", kProtocolVersion}, {"code", code}, {"detail", detail}}.dump();
}

std::vector<std::string> SessionEndpoint::on_open()
{
  Json hello{{"type", "hello"},
             {"protocol_version", kProtocolVersion},
             {"scenarios", catalog_->names()},
             {"modes", {"teleop", "sag", "vosa"}},
             {"hold_ticks", hold_ticks_}};
  return {hello.dump()};
}

std::vector<std::string> SessionEndpoint::on_message(const std::string& text)
{
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    if (session_) session_->submit_zero();
    return {error_frame("parse_error", e.what())};
  }
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    if (session_) session_->submit_zero();
    return {error_frame("bad_frame", "frame needs a string 'type'")};
  }
  if (j.value("protocol_version", -1) != kProtocolVersion) {
    if (session_) session_->submit_zero();
    return {error_frame("unsupported_version", "expected protocol_version " + std::to_string(kProtocolVersion))};
  }

  const auto type = j.at("type").get<std::string>();
  if (type == "start") {
    try {
      const auto name = j.at("scenario").get<std::string>();
      const ScenarioSpec* spec = catalog_->find(name);
      if (!spec) return {error_frame("unknown_scenario", name)};
      const auto mode = j.value("mode", std::string("vosa"));
      const auto seed = j.value("seed", std::uint64_t{0});
      on_close();
      session_ = std::make_unique<Session>(*spec, mode, seed, hold_ticks_);
      persisted_ = false;
    } catch (const nlohmann::json::exception& e) {
      return {error_frame("bad_start", e.what())};
    } catch (const Error& e) {
      return {error_frame("bad_start", e.what())};
    }
    return {snapshot(session_->runner().scene(), session_->runner().controller(), session_->runner().outcome(), 0)
                .dump()};
  }
  if (type == "cmd") {
    if (!session_) return {error_frame("no_session", "send a start frame first")};
    try {
      const ClientCommand c = parse_command(j);
      const std::string mode_before = session_->mode();
      if (!session_->submit(c)) return {error_frame("stale_seq", "seq " + std::to_string(c.seq) + " ignored")};
      for (auto& log : session_->take_abandoned()) persist(log);
      if (session_->mode() != mode_before) persisted_ = false;
    } catch (const Error& e) {
      session_->submit_zero();
      return {error_frame("bad_command", e.what())};
    }
    return {};
  }
  if (session_) session_->submit_zero();
  return {error_frame("unknown_type", type)};
}

std::optional<std::string> SessionEndpoint::on_tick()
{
  if (!session_) return std::nullopt;
  const bool was_finished = session_->finished();
  std::string frame = session_->tick().dump();
  if (!was_finished && session_->finished()) on_close();
  return frame;
}

void SessionEndpoint::on_close()
{
  if (!session_ || persisted_) return;
  if (!session_->log().ticks.empty()) persist(session_->log());
  persisted_ = true;
}

void SessionEndpoint::persist(const EpisodeLog& log)
{
  if (!log_dir_) return;
  static std::atomic<std::uint64_t> counter{0};
  std::filesystem::create_directories(*log_dir_);
  const auto stamp = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
  const auto name = "session_" + std::to_string(stamp) + "_" + std::to_string(counter++) + "_" +
                    log.header.scenario.name + "_" + log.header.mode + ".jsonl";
  const auto path = (std::filesystem::path(*log_dir_) / name).string();
  save_log(path, log);
  written_.push_back(path);
}

}  // namespace vosa
