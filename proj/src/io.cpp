#include "vosa/io.hpp"

#include "vosa/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace vosa {

namespace {

const Json& req(const Json& j, const char* key)
{
  if (!j.is_object()) throw ParseError(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const Json& j, const char* key)
{
  try {
    return req(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback)
{
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key);
}

Vec3 vec_or(const Json& j, const char* key, const Vec3& fallback)
{
  if (!j.is_object() || !j.contains(key)) return fallback;
  return vec_from_json(j.at(key));
}

std::string hex(std::uint64_t v)
{
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t unhex(const std::string& s)
{
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used, 16);
    if (used != s.size()) throw ParseError("bad hex value '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad hex value '" + s + "'");
  }
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json shape_to_json(const Shape& s)
{
  if (const auto* sp = std::get_if<Sphere>(&s)) return {{"type", "sphere"}, {"radius", sp->radius}};
  return {{"type", "box"}, {"half_extents", vec_to_json(std::get<Box>(s).half_extents)}};
}

Shape shape_from_json(const Json& j)
{
  const auto type = get<std::string>(j, "type");
  if (type == "sphere") return Sphere{get<double>(j, "radius")};
  if (type == "box") return Box{vec_from_json(req(j, "half_extents"))};
  throw ParseError("unknown shape type '" + type + "'");
}

Json object_to_json(const SceneObject& o)
{
  return {{"id", o.id}, {"shape", shape_to_json(o.shape)}, {"position", vec_to_json(o.position)}, {"graspable", o.graspable}};
}

SceneObject object_from_json(const Json& j)
{
  SceneObject o;
  o.id = get<std::string>(j, "id");
  o.shape = shape_from_json(req(j, "shape"));
  o.position = vec_from_json(req(j, "position"));
  o.graspable = get_or<bool>(j, "graspable", true);
  return o;
}

Json event_to_json(const SpawnEvent& ev)
{
  Json j{{"time", ev.time}};
  if (const auto* a = std::get_if<AddObject>(&ev.action))
    j["add"] = object_to_json(a->object);
  else if (const auto* r = std::get_if<RemoveObject>(&ev.action))
    j["remove"] = r->id;
  else {
    const auto& m = std::get<MoveObject>(ev.action);
    j["move"] = {{"id", m.id}, {"position", vec_to_json(m.position)}};
  }
  return j;
}

SpawnEvent event_from_json(const Json& j)
{
  SpawnEvent ev;
  ev.time = get<double>(j, "time");
  if (j.contains("add"))
    ev.action = AddObject{object_from_json(j.at("add"))};
  else if (j.contains("remove"))
    ev.action = RemoveObject{get<std::string>(j, "remove")};
  else if (j.contains("move"))
    ev.action = MoveObject{get<std::string>(j.at("move"), "id"), vec_from_json(req(j.at("move"), "position"))};
  else
    throw ParseError("spawn event needs one of add, remove, move");
  return ev;
}

Json camera_to_json(const CameraModel& c)
{
  return {{"width", c.width},
          {"height", c.height},
          {"fov_x", c.fov_x},
          {"fov_y", c.fov_y},
          {"min_range", c.min_range},
          {"max_range", c.max_range},
          {"mount_offset", vec_to_json(c.mount_offset)},
          {"range_noise_sigma", c.range_noise_sigma},
          {"noise_seed", c.noise_seed}};
}

CameraModel camera_from_json(const Json& j)
{
  CameraModel c;
  c.width = get_or(j, "width", c.width);
  c.height = get_or(j, "height", c.height);
  c.fov_x = get_or(j, "fov_x", c.fov_x);
  c.fov_y = get_or(j, "fov_y", c.fov_y);
  c.min_range = get_or(j, "min_range", c.min_range);
  c.max_range = get_or(j, "max_range", c.max_range);
  c.mount_offset = vec_or(j, "mount_offset", c.mount_offset);
  c.range_noise_sigma = get_or(j, "range_noise_sigma", c.range_noise_sigma);
  c.noise_seed = get_or(j, "noise_seed", c.noise_seed);
  return c;
}

Json estimator_to_json(const CountEstimator& e)
{
  if (const auto* n = std::get_if<NoisyCount>(&e)) return {{"kind", "noisy"}, {"p_err", n->p_err}, {"max_dev", n->max_dev}};
  if (const auto* f = std::get_if<FixedCount>(&e)) return {{"kind", "fixed"}, {"k", f->k}};
  return {{"kind", "oracle"}};
}

CountEstimator estimator_from_json(const Json& j)
{
  const auto kind = get<std::string>(j, "kind");
  if (kind == "oracle") return OracleCount{};
  if (kind == "noisy") {
    NoisyCount n;
    n.p_err = get_or(j, "p_err", n.p_err);
    n.max_dev = get_or(j, "max_dev", n.max_dev);
    return n;
  }
  if (kind == "fixed") return FixedCount{get<int>(j, "k")};
  throw ParseError("unknown count estimator '" + kind + "'");
}

Json traits_to_json(const HumanTraits& t)
{
  return {{"switch_ticks", t.switch_ticks},       {"align_tolerance", t.align_tolerance},
          {"clearance_height", t.clearance_height}, {"lift_distance", t.lift_distance},
          {"slow_radius", t.slow_radius},
          {"min_deflection", t.min_deflection},   {"grasp_trigger", t.grasp_trigger},
          {"release_radius", t.release_radius}};
}

HumanTraits traits_from_json(const Json& j)
{
  HumanTraits t;
  t.switch_ticks = get_or(j, "switch_ticks", t.switch_ticks);
  t.align_tolerance = get_or(j, "align_tolerance", t.align_tolerance);
  t.clearance_height = get_or(j, "clearance_height", t.clearance_height);
  t.lift_distance = get_or(j, "lift_distance", t.lift_distance);
  t.slow_radius = get_or(j, "slow_radius", t.slow_radius);
  t.min_deflection = get_or(j, "min_deflection", t.min_deflection);
  t.grasp_trigger = get_or(j, "grasp_trigger", t.grasp_trigger);
  t.release_radius = get_or(j, "release_radius", t.release_radius);
  return t;
}

std::vector<PlanStep> plan_from_json(const Json& j)
{
  if (!j.is_array()) throw ParseError("plan must be an array");
  std::vector<PlanStep> plan;
  for (const auto& step : j) {
    PlanStep p;
    p.object = get<std::string>(step, "object");
    if (step.contains("pedestal") && !step.at("pedestal").is_null()) p.pedestal = get<std::string>(step, "pedestal");
    plan.push_back(p);
  }
  return plan;
}

}  // namespace

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const Json& j)
{
  if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-vector");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ParseError("3-vector entries must be numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

Json to_json(const SceneState& s)
{
  Json j;
  j["t"] = s.t;
  j["z_table"] = s.params.z_table;
  j["v_max"] = s.params.v_max;
  j["dt"] = s.params.dt;
  j["grasp_radius"] = s.params.grasp_radius;
  j["bounds"] = {{"min", vec_to_json(s.bounds.min())}, {"max", vec_to_json(s.bounds.max())}};
  j["effector"] = {{"home", vec_to_json(s.effector.home)},
                   {"position", vec_to_json(s.effector.position)},
                   {"gripper", to_string(s.effector.gripper)},
                   {"attached", s.effector.attached ? Json(*s.effector.attached) : Json(nullptr)},
                   {"grasp_offset", vec_to_json(s.effector.grasp_offset)}};
  j["objects"] = Json::array();
  for (const auto& o : s.objects) j["objects"].push_back(object_to_json(o));
  j["pedestals"] = Json::array();
  for (const auto& p : s.pedestals)
    j["pedestals"].push_back({{"id", p.id}, {"position", vec_to_json(p.position)}, {"radius", p.radius}});
  j["events"] = Json::array();
  for (const auto& ev : s.pending_events) j["events"].push_back(event_to_json(ev));
  return j;
}

SceneState scene_from_json(const Json& j)
{
  SceneState s;
  s.t = get_or(j, "t", 0.0);
  s.params.z_table = get_or(j, "z_table", s.params.z_table);
  s.params.v_max = get_or(j, "v_max", s.params.v_max);
  s.params.dt = get_or(j, "dt", s.params.dt);
  s.params.grasp_radius = get_or(j, "grasp_radius", s.params.grasp_radius);
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    s.bounds = Bounds(vec_from_json(req(b, "min")), vec_from_json(req(b, "max")));
  }
  const auto& e = req(j, "effector");
  s.effector.home = vec_from_json(req(e, "home"));
  s.effector.position = vec_or(e, "position", s.effector.home);
  const auto gripper = get_or<std::string>(e, "gripper", "open");
  if (gripper != "open" && gripper != "closed") throw ParseError("gripper must be open or closed");
  s.effector.gripper = gripper == "open" ? Gripper::open : Gripper::closed;
  if (e.contains("attached") && !e.at("attached").is_null()) s.effector.attached = get<std::string>(e, "attached");
  s.effector.grasp_offset = vec_or(e, "grasp_offset", Vec3::Zero());
  for (const auto& o : get_or(j, "objects", Json::array())) s.objects.push_back(object_from_json(o));
  for (const auto& p : get_or(j, "pedestals", Json::array())) {
    Pedestal ped;
    ped.id = get<std::string>(p, "id");
    ped.position = vec_from_json(req(p, "position"));
    ped.radius = get_or(p, "radius", ped.radius);
    s.pedestals.push_back(ped);
  }
  for (const auto& ev : get_or(j, "events", Json::array())) s.pending_events.push_back(event_from_json(ev));
  return s;
}

Json to_json(const ControllerConfig& c)
{
  const auto& p = c.perception;
  return {{"weights", {{"w1", c.weights.w1}, {"w2", c.weights.w2}, {"distance_scale", c.weights.distance_scale}}},
          {"curve", {{"c_lo", c.curve.c_lo}, {"c_hi", c.curve.c_hi}, {"alpha_max", c.curve.alpha_max}}},
          {"home_radius", c.home_radius},
          {"perception",
           {{"camera", camera_to_json(p.camera)},
            {"estimator", estimator_to_json(p.estimator)},
            {"table_margin", p.table_margin},
            {"min_points", p.min_points},
            {"sensing_interval", p.sensing_interval},
            {"kmeans",
             {{"max_iterations", p.kmeans.max_iterations},
              {"tolerance", p.kmeans.tolerance},
              {"restarts", p.kmeans.restarts}}}}}};
}

ControllerConfig assist_from_json(const Json& j)
{
  ControllerConfig c;
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    c.weights.w1 = get_or(w, "w1", c.weights.w1);
    c.weights.w2 = get_or(w, "w2", c.weights.w2);
    c.weights.distance_scale = get_or(w, "distance_scale", c.weights.distance_scale);
  }
  if (j.contains("curve")) {
    const auto& k = j.at("curve");
    c.curve.c_lo = get_or(k, "c_lo", c.curve.c_lo);
    c.curve.c_hi = get_or(k, "c_hi", c.curve.c_hi);
    c.curve.alpha_max = get_or(k, "alpha_max", c.curve.alpha_max);
  }
  c.home_radius = get_or(j, "home_radius", c.home_radius);
  if (j.contains("perception")) {
    const auto& p = j.at("perception");
    auto& out = c.perception;
    if (p.contains("camera")) out.camera = camera_from_json(p.at("camera"));
    if (p.contains("estimator")) out.estimator = estimator_from_json(p.at("estimator"));
    out.table_margin = get_or(p, "table_margin", out.table_margin);
    out.min_points = get_or(p, "min_points", out.min_points);
    out.sensing_interval = get_or(p, "sensing_interval", out.sensing_interval);
    if (p.contains("kmeans")) {
      const auto& k = p.at("kmeans");
      out.kmeans.max_iterations = get_or(k, "max_iterations", out.kmeans.max_iterations);
      out.kmeans.tolerance = get_or(k, "tolerance", out.kmeans.tolerance);
      out.kmeans.restarts = get_or(k, "restarts", out.kmeans.restarts);
    }
  }
  return c;
}

Json to_json(const ScenarioSpec& s)
{
  Json j;
  j["name"] = s.name;
  j["timeout"] = s.timeout;
  j["scene"] = to_json(s.scene);
  j["plan"] = Json::array();
  for (const auto& step : s.plan)
    j["plan"].push_back({{"object", step.object}, {"pedestal", step.pedestal ? Json(*step.pedestal) : Json(nullptr)}});
  j["sag_intents"] = Json::array();
  for (const auto& g : s.sag_intents) j["sag_intents"].push_back(vec_to_json(g));
  j["assist"] = to_json(s.assist);
  return j;
}

ScenarioSpec scenario_from_json(const Json& j)
{
  try {
    ScenarioSpec s;
    s.name = get<std::string>(j, "name");
    s.timeout = get_or(j, "timeout", s.timeout);
    s.scene = scene_from_json(req(j, "scene"));
    s.plan = plan_from_json(req(j, "plan"));
    for (const auto& g : get_or(j, "sag_intents", Json::array())) s.sag_intents.push_back(vec_from_json(g));
    if (j.contains("assist")) s.assist = assist_from_json(j.at("assist"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
}

ScenarioSpec load_scenario_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open scenario file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("scenario file '" + path + "': " + e.what());
  }
  ScenarioSpec s = scenario_from_json(j);
  validate(s);
  return s;
}

ScenarioSpec resolve_scenario(const std::string& name_or_path)
{
  for (const auto& n : builtin_scenario_names())
    if (n == name_or_path) return builtin_scenario(n);
  if (!std::filesystem::exists(name_or_path))
    throw ConfigError("unknown scenario '" + name_or_path + "': neither a built-in name nor a file");
  return load_scenario_file(name_or_path);
}

Json to_json(const HumanModel& h)
{
  Json j{{"kind", kind_name(h.kind)}};
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        j["noise_sigma"] = k.noise_sigma;
        if constexpr (std::is_same_v<K, GoalDirectedHuman>) j["deadzone"] = k.deadzone;
        if constexpr (std::is_same_v<K, CompliantHuman>) {
          j["cone_angle"] = k.cone_angle;
          j["min_assist_speed"] = k.min_assist_speed;
          j["match_radius"] = k.match_radius;
          j["takeover_radius"] = k.takeover_radius;
          j["deadzone"] = k.deadzone;
        }
      },
      h.kind);
  j["traits"] = traits_to_json(h.traits);
  j["plan"] = Json::array();
  for (const auto& step : h.plan)
    j["plan"].push_back({{"object", step.object}, {"pedestal", step.pedestal ? Json(*step.pedestal) : Json(nullptr)}});
  return j;
}

HumanModel human_from_json(const Json& j, const std::vector<PlanStep>& plan)
{
  HumanModel h;
  h.plan = j.contains("plan") ? plan_from_json(j.at("plan")) : plan;
  const auto kind = get<std::string>(j, "kind");
  if (kind == "goal_directed") {
    GoalDirectedHuman g;
    g.noise_sigma = get_or(j, "noise_sigma", g.noise_sigma);
    g.deadzone = get_or(j, "deadzone", g.deadzone);
    h.kind = g;
  } else if (kind == "stubborn") {
    StubbornHuman s;
    s.noise_sigma = get_or(j, "noise_sigma", s.noise_sigma);
    h.kind = s;
  } else if (kind == "compliant") {
    CompliantHuman c;
    c.noise_sigma = get_or(j, "noise_sigma", c.noise_sigma);
    c.cone_angle = get_or(j, "cone_angle", c.cone_angle);
    c.min_assist_speed = get_or(j, "min_assist_speed", c.min_assist_speed);
    c.match_radius = get_or(j, "match_radius", c.match_radius);
    c.takeover_radius = get_or(j, "takeover_radius", c.takeover_radius);
    c.deadzone = get_or(j, "deadzone", c.deadzone);
    h.kind = c;
  } else {
    throw ConfigError("unknown human model '" + kind + "'");
  }
  if (j.contains("traits")) h.traits = traits_from_json(j.at("traits"));
  h.validate();
  return h;
}

Json to_json(const TickRecord& r)
{
  Json j;
  j["type"] = "tick";
  j["tick"] = r.tick;
  j["t"] = r.t;
  j["phase"] = to_string(r.phase);
  j["next_phase"] = to_string(r.next_phase);
  j["x"] = vec_to_json(r.position);
  j["gripper"] = to_string(r.gripper);
  j["attached"] = r.attached ? Json(*r.attached) : Json(nullptr);
  j["human_gripper"] = to_string(r.human_gripper);
  j["gripper_out"] = to_string(r.gripper_out);
  j["u_in"] = vec_to_json(r.u_in);
  j["u_h"] = vec_to_json(r.blend.u_h);
  j["u_r"] = vec_to_json(r.blend.u_r);
  j["u"] = vec_to_json(r.blend.u);
  j["c"] = finite_or_null(r.blend.c);
  j["alpha"] = r.blend.alpha;
  j["selected"] = r.blend.selected_intent ? Json(*r.blend.selected_intent) : Json(nullptr);
  j["sensed"] = r.sensing_attempted;
  j["gate"] = r.gate_open;
  j["perception"] = to_string(r.perception);
  j["g_updated"] = r.intents_updated;
  j["g_count"] = r.intent_count;
  j["g_hash"] = hex(r.intents_hash);
  j["events"] = r.events;
  return j;
}

TickRecord tick_from_json(const Json& j)
{
  try {
    TickRecord r;
    r.tick = get<int>(j, "tick");
    r.t = get<double>(j, "t");
    r.phase = phase_from_string(get<std::string>(j, "phase"));
    r.next_phase = phase_from_string(get<std::string>(j, "next_phase"));
    r.position = vec_from_json(req(j, "x"));
    const auto g = get<std::string>(j, "gripper");
    if (g != "open" && g != "closed") throw ParseError("gripper must be open or closed");
    r.gripper = g == "open" ? Gripper::open : Gripper::closed;
    if (!req(j, "attached").is_null()) r.attached = get<std::string>(j, "attached");
    r.human_gripper = gripper_command_from_string(get<std::string>(j, "human_gripper"));
    r.gripper_out = gripper_command_from_string(get<std::string>(j, "gripper_out"));
    r.u_in = vec_from_json(req(j, "u_in"));
    r.blend.u_h = vec_from_json(req(j, "u_h"));
    r.blend.u_r = vec_from_json(req(j, "u_r"));
    r.blend.u = vec_from_json(req(j, "u"));
    const auto& c = req(j, "c");
    r.blend.c = c.is_null() ? -std::numeric_limits<double>::infinity() : c.get<double>();
    r.blend.alpha = get<double>(j, "alpha");
    if (!req(j, "selected").is_null()) r.blend.selected_intent = get<std::size_t>(j, "selected");
    r.blend.t = r.t;
    r.sensing_attempted = get<bool>(j, "sensed");
    r.gate_open = get<bool>(j, "gate");
    const auto p = get<std::string>(j, "perception");
    if (p == "updated")
      r.perception = PerceptionStatus::updated;
    else if (p == "unchanged")
      r.perception = PerceptionStatus::unchanged;
    else if (p == "degraded")
      r.perception = PerceptionStatus::degraded;
    else
      throw ParseError("unknown perception status '" + p + "'");
    r.intents_updated = get<bool>(j, "g_updated");
    r.intent_count = get<std::size_t>(j, "g_count");
    r.intents_hash = unhex(get<std::string>(j, "g_hash"));
    r.events = get<std::vector<std::string>>(j, "events");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("tick record: ") + e.what());
  }
}

Json header_to_json(const EpisodeHeader& h)
{
  return {{"type", "header"},
          {"scenario", to_json(h.scenario)},
          {"mode", h.mode},
          {"source", h.source == InputSource::model ? "model" : "recorded"},
          {"human", h.human ? to_json(*h.human) : Json(nullptr)},
          {"seed", h.seed},
          {"config_hash", hex(h.config_hash)}};
}

EpisodeHeader header_from_json(const Json& j)
{
  EpisodeHeader h;
  if (get<std::string>(j, "type") != "header") throw ParseError("log must start with a header record");
  h.scenario = scenario_from_json(req(j, "scenario"));
  h.mode = get<std::string>(j, "mode");
  const auto src = get<std::string>(j, "source");
  if (src == "model")
    h.source = InputSource::model;
  else if (src == "recorded")
    h.source = InputSource::recorded;
  else
    throw ParseError("unknown input source '" + src + "'");
  if (!req(j, "human").is_null()) h.human = human_from_json(j.at("human"), h.scenario.plan);
  h.seed = get<std::uint64_t>(j, "seed");
  h.config_hash = unhex(get<std::string>(j, "config_hash"));
  return h;
}

void write_log(std::ostream& os, const EpisodeLog& log)
{
  os << header_to_json(log.header).dump() << '\n';
  for (const auto& r : log.ticks) os << to_json(r).dump() << '\n';
  const Metrics m = compute_metrics(log);
  Json summary{{"type", "summary"},
               {"outcome", to_string(log.outcome)},
               {"ticks", log.ticks.size()},
               {"success", m.success},
               {"completion_time", m.completion_time},
               {"input_magnitude", m.input_magnitude},
               {"final_scene", to_json(log.final_scene)}};
  os << summary.dump() << '\n';
}

EpisodeLog read_log(std::istream& is)
{
  EpisodeLog log;
  std::string line;
  bool have_header = false;
  bool have_summary = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (have_summary) throw ParseError("log line " + std::to_string(lineno) + ": data after summary");
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("log line " + std::to_string(lineno) + ": " + e.what());
    }
    const auto type = get<std::string>(j, "type");
    if (!have_header) {
      log.header = header_from_json(j);
      have_header = true;
    } else if (type == "tick") {
      log.ticks.push_back(tick_from_json(j));
    } else if (type == "summary") {
      log.outcome = outcome_from_string(get<std::string>(j, "outcome"));
      if (get<std::size_t>(j, "ticks") != log.ticks.size()) throw ParseError("summary tick count disagrees with the log");
      log.final_scene = scene_from_json(req(j, "final_scene"));
      have_summary = true;
    } else {
      throw ParseError("log line " + std::to_string(lineno) + ": unknown record type '" + type + "'");
    }
  }
  if (!have_header) throw ParseError("empty log");
  if (!have_summary) throw ParseError("log has no summary record");
  return log;
}

void save_log(const std::string& path, const EpisodeLog& log)
{
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::io, "cannot write log '" + path + "'");
  write_log(out, log);
}

EpisodeLog load_log(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open log '" + path + "'");
  return read_log(in);
}

}  // namespace vosa
