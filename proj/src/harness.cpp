#include "vosa/harness.hpp"

#include "vosa/error.hpp"
#include "vosa/io.hpp"

#include <cmath>

namespace vosa {

const char* to_string(Outcome o)
{
  switch (o) {
    case Outcome::running: return "running";
    case Outcome::success: return "success";
    case Outcome::timeout: return "timeout";
  }
  return "?";
}

Outcome outcome_from_string(const std::string& s)
{
  if (s == "running") return Outcome::running;
  if (s == "success") return Outcome::success;
  if (s == "timeout") return Outcome::timeout;
  throw ParseError("unknown outcome '" + s + "'");
}

std::uint64_t config_hash(const EpisodeHeader& header)
{
  Json j = header_to_json(header);
  j.erase("config_hash");
  return fnv1a(j.dump());
}

namespace {

std::uint64_t hash_intents(const IntentSet& g)
{
  std::uint64_t h = fnv1a(std::string_view{});
  for (const auto& p : g.intents) h = fnv1a(p.data(), sizeof(double) * 3, h);
  return h;
}

}  // namespace

EpisodeRunner::EpisodeRunner(ScenarioSpec spec, const std::string& mode, std::uint64_t seed, InputSource source,
                             std::optional<HumanModel> human)
{
  validate(spec);
  if (source == InputSource::model) {
    if (!human) throw ConfigError("model-driven episode needs a human model");
    if (human->plan.empty()) human->plan = spec.plan;
    human->validate();
  } else {
    human.reset();
  }
  controller_ = make_controller(make_mode(spec, mode), controller_config(spec));
  scene_ = spec.scene;
  perception_rng_ = derive_rng(seed, kStreamPerception);
  max_ticks_ = static_cast<int>(std::floor(spec.timeout / spec.scene.params.dt + 1e-9));

  log_.header.scenario = std::move(spec);
  log_.header.mode = mode;
  log_.header.source = source;
  log_.header.human = std::move(human);
  log_.header.seed = seed;
  log_.header.config_hash = config_hash(log_.header);
  log_.final_scene = scene_;
}

const TickRecord& EpisodeRunner::step(const Vec3& u_h, GripperCommand gripper_cmd)
{
  if (finished()) throw ContractViolation("episode already finished");

  TickRecord rec;
  rec.tick = static_cast<int>(log_.ticks.size());
  rec.t = scene_.t;
  rec.phase = controller_.phase;
  rec.u_in = u_h;
  rec.human_gripper = gripper_cmd;

  // Gate status is recomputed here rather than taken from the controller so
  // that the legality check does not trust the code it is checking.
  const CameraModel& cam = controller_.config.perception.camera;
  TickResult tr = controller_tick(controller_, scene_, u_h, gripper_cmd, perception_rng_);
  if (tr.diag.sensing_attempted) rec.gate_open = sensing_allowed(scene_, cam);

  scene_ = step_scene(scene_, tr.command, tr.gripper, scene_.params.dt);
  controller_ = std::move(tr.state);

  rec.next_phase = controller_.phase;
  rec.position = scene_.effector.position;
  rec.gripper = scene_.effector.gripper;
  rec.attached = scene_.effector.attached;
  rec.gripper_out = tr.gripper;
  rec.blend = controller_.last_blend;
  rec.sensing_attempted = tr.diag.sensing_attempted;
  rec.perception = tr.diag.perception;
  rec.intents_updated = tr.diag.intents_updated;
  rec.intent_count = controller_.grasp_intents.intents.size();
  rec.intents_hash = hash_intents(controller_.grasp_intents);
  for (const auto& a : scene_.annotations) {
    std::string s = to_string(a.kind);
    if (!a.detail.empty()) s += ":" + a.detail;
    rec.events.push_back(std::move(s));
  }
  log_.ticks.push_back(std::move(rec));

  if (episode_done(controller_, scene_, log_.header.scenario.plan))
    log_.outcome = Outcome::success;
  else if (static_cast<int>(log_.ticks.size()) >= max_ticks_)
    log_.outcome = Outcome::timeout;
  log_.final_scene = scene_;
  return log_.ticks.back();
}

EpisodeLog run_episode(const ScenarioSpec& spec, const std::string& mode, const HumanModel& human, std::uint64_t seed)
{
  EpisodeRunner runner(spec, mode, seed, InputSource::model, human);
  const HumanModel& h = *runner.log().header.human;
  Rng rng = derive_rng(seed, kStreamHuman);
  HumanState hs;
  while (!runner.finished()) {
    const HumanOutput out = human_command(h, hs, runner.scene(), runner.controller(), rng);
    hs = out.state;
    runner.step(out.u_h, out.gripper);
  }
  return runner.take_log();
}

EpisodeLog run_recorded(const ScenarioSpec& spec, const std::string& mode, const std::vector<RecordedInput>& inputs,
                        std::uint64_t seed)
{
  EpisodeRunner runner(spec, mode, seed, InputSource::recorded);
  for (const auto& in : inputs) {
    if (runner.finished()) break;
    runner.step(in.u_h, in.gripper);
  }
  return runner.take_log();
}

std::vector<RecordedInput> inputs_of(const EpisodeLog& log)
{
  std::vector<RecordedInput> out;
  out.reserve(log.ticks.size());
  for (const auto& r : log.ticks) out.push_back({r.u_in, r.human_gripper});
  return out;
}

double input_magnitude(const EpisodeLog& log, std::size_t begin, std::size_t end)
{
  if (begin > end || end > log.ticks.size()) throw ContractViolation("tick range out of bounds");
  const double dt = log.header.scenario.scene.params.dt;
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) sum += log.ticks[i].blend.u_h.norm() * dt;
  return sum;
}

Metrics compute_metrics(const EpisodeLog& log)
{
  Metrics m;
  const double dt = log.header.scenario.scene.params.dt;
  m.ticks = static_cast<int>(log.ticks.size());
  m.success = log.outcome == Outcome::success;
  m.completion_time = log.outcome == Outcome::timeout ? log.header.scenario.timeout : m.ticks * dt;
  m.input_magnitude = input_magnitude(log, 0, log.ticks.size());
  return m;
}

std::vector<std::string> check_legality(const EpisodeLog& log)
{
  std::vector<std::string> v;
  const bool vosa = log.header.mode == "vosa";
  for (std::size_t i = 0; i < log.ticks.size(); ++i) {
    const auto& r = log.ticks[i];
    const std::string at = "tick " + std::to_string(r.tick) + ": ";
    if (!legal_transition(r.phase, r.next_phase))
      v.push_back(at + "illegal transition " + to_string(r.phase) + " -> " + to_string(r.next_phase));
    if (i > 0 && log.ticks[i - 1].next_phase != r.phase)
      v.push_back(at + "phase discontinuity after previous tick");
    if (vosa && r.intents_updated && !(r.sensing_attempted && r.gate_open))
      v.push_back(at + "intent set updated while the sensing gate was closed");
  }
  if (!log.ticks.empty() && log.ticks.front().phase != Phase::object_sensing)
    v.push_back("episode does not start in object_sensing");
  return v;
}

ReplayResult replay(const EpisodeLog& log)
{
  ReplayResult res;
  const auto& h = log.header;
  if (h.source == InputSource::model) {
    if (!h.human) throw ParseError("model-driven log has no human model");
    res.replayed = run_episode(h.scenario, h.mode, *h.human, h.seed);
  } else {
    res.replayed = run_recorded(h.scenario, h.mode, inputs_of(log), h.seed);
  }

  auto differ = [&](const std::string& what) {
    res.identical = false;
    res.first_difference = what;
    return res;
  };
  if (res.replayed.header.config_hash != h.config_hash) return differ("config hash");
  const std::size_t n = std::min(log.ticks.size(), res.replayed.ticks.size());
  for (std::size_t i = 0; i < n; ++i)
    if (to_json(log.ticks[i]).dump() != to_json(res.replayed.ticks[i]).dump())
      return differ("tick " + std::to_string(i));
  if (log.ticks.size() != res.replayed.ticks.size())
    return differ("tick count " + std::to_string(log.ticks.size()) + " vs " + std::to_string(res.replayed.ticks.size()));
  if (log.outcome != res.replayed.outcome) return differ("outcome");
  if (to_json(log.final_scene).dump() != to_json(res.replayed.final_scene).dump()) return differ("final scene");
  res.identical = true;
  return res;
}

}  // namespace vosa
