#include "vosa/controller.hpp"

#include "vosa/error.hpp"

#include <limits>

namespace vosa {

Phase next_phase(Phase p)
{
  switch (p) {
    case Phase::object_sensing: return Phase::grasping;
    case Phase::grasping: return Phase::placing;
    case Phase::placing: return Phase::active_sensing;
    case Phase::active_sensing: return Phase::object_sensing;
  }
  return Phase::object_sensing;
}

bool legal_transition(Phase from, Phase to) { return from == to || next_phase(from) == to; }

const char* to_string(Phase p)
{
  switch (p) {
    case Phase::object_sensing: return "object_sensing";
    case Phase::grasping: return "grasping";
    case Phase::placing: return "placing";
    case Phase::active_sensing: return "active_sensing";
  }
  return "?";
}

Phase phase_from_string(const std::string& s)
{
  if (s == "object_sensing") return Phase::object_sensing;
  if (s == "grasping") return Phase::grasping;
  if (s == "placing") return Phase::placing;
  if (s == "active_sensing") return Phase::active_sensing;
  throw ParseError("unknown phase '" + s + "'");
}

std::string mode_name(const AssistMode& mode)
{
  if (std::holds_alternative<TeleopMode>(mode)) return "teleop";
  if (std::holds_alternative<SagMode>(mode)) return "sag";
  return "vosa";
}

bool is_teleop(const AssistMode& mode) { return std::holds_alternative<TeleopMode>(mode); }

void ControllerConfig::validate() const
{
  curve.validate();
  perception.camera.validate();
  vosa::validate(perception.estimator);
  if (!(weights.distance_scale > 0.0)) throw ConfigError("confidence distance_scale must be positive");
  if (!(home_radius > 0.0)) throw ConfigError("home_radius must be positive");
  if (perception.sensing_interval < 1) throw ConfigError("sensing_interval must be >= 1");
  if (perception.min_points < 1) throw ConfigError("min_points must be >= 1");
  if (perception.table_margin < 0.0) throw ConfigError("table_margin must be >= 0");
}

ControllerState make_controller(AssistMode mode, ControllerConfig config)
{
  config.validate();
  ControllerState cs;
  cs.mode = std::move(mode);
  cs.config = std::move(config);
  return cs;
}

namespace {

BlendState assist_toward(const ControllerState& cs, const Vec3& u_h, const Vec3& x,
                         const std::vector<Vec3>& intents, double t)
{
  BlendState b;
  b.u_h = u_h;
  b.t = t;
  const Prediction p = predict<double>(u_h, x, intents, cs.config.weights);
  b.u_r = p.u_r;
  b.c = p.c;
  b.selected_intent = p.selected;
  b.alpha = alpha_of(p.c, cs.config.curve);
  b.u = blend<double>(u_h, b.u_r, b.alpha);
  return b;
}

BlendState passthrough(const Vec3& u_h, double t)
{
  BlendState b;
  b.u_h = u_h;
  b.u = blend<double>(u_h, Vec3::Zero(), 0.0);
  b.c = -std::numeric_limits<double>::infinity();
  b.t = t;
  return b;
}

}  // namespace

TickResult controller_tick(const ControllerState& cs, const SceneState& scene, const Vec3& u_h_in,
                           GripperCommand gripper_cmd, Rng& rng)
{
  TickResult r;
  r.state = cs;
  ControllerState& s = r.state;
  r.diag.phase_before = cs.phase;

  const Vec3 u_h = clamp_unit(u_h_in);
  const Vec3& x = scene.effector.position;
  const double t = scene.t;
  const bool teleop = is_teleop(cs.mode);
  Phase next = cs.phase;
  BlendState b;

  switch (cs.phase) {
    case Phase::object_sensing: {
      if (teleop) {
        b = passthrough(u_h, t);
        next = Phase::grasping;
        break;
      }
      if (const auto* sag = std::get_if<SagMode>(&cs.mode)) {
        if (!s.sensed_this_visit) {
          s.grasp_intents.intents = sag->static_intents;
          s.grasp_intents.member_counts.clear();
          s.grasp_intents.t_updated = t;
          s.sensed_this_visit = true;
          r.diag.intents_updated = true;
        }
      } else if (cs.ticks_in_phase % cs.config.perception.sensing_interval == 0) {
        r.diag.sensing_attempted = true;
        const PerceptionOutcome out = perceive_intents(scene, cs.config.perception, rng, t);
        r.diag.gate_open = out.status != PerceptionStatus::unchanged;
        r.diag.perception = out.status;
        if (out.status == PerceptionStatus::updated) {
          s.grasp_intents = out.intents;
          s.sensed_this_visit = true;
          r.diag.intents_updated = true;
        }
      }
      b = assist_toward(s, u_h, x, s.grasp_intents.intents, t);
      if (s.sensed_this_visit && !s.grasp_intents.empty()) next = Phase::grasping;
      break;
    }
    case Phase::grasping:
      b = teleop ? passthrough(u_h, t) : assist_toward(s, u_h, x, s.grasp_intents.intents, t);
      if (gripper_cmd == GripperCommand::close) {
        r.gripper = GripperCommand::close;
        next = Phase::placing;
      }
      break;
    case Phase::placing: {
      if (teleop) {
        b = passthrough(u_h, t);
      } else {
        // Intents locate the held object; steer the effector so that it lands there.
        std::vector<Vec3> targets = cs.config.placement_intents;
        if (scene.effector.attached)
          for (auto& g : targets) g -= scene.effector.grasp_offset;
        b = assist_toward(s, u_h, x, targets, t);
      }
      if (gripper_cmd == GripperCommand::open) {
        r.gripper = GripperCommand::open;
        next = Phase::active_sensing;
      }
      break;
    }
    case Phase::active_sensing: {
      if (teleop) {
        b = passthrough(u_h, t);
        next = Phase::object_sensing;
        break;
      }
      const Vec3& home = scene.effector.home;
      b.u_h = u_h;
      b.t = t;
      b.u_r = intent_direction<double>(x, home);
      b.c = confidence<double>(u_h, b.u_r, (home - x).norm(), cs.config.weights);
      b.alpha = cs.config.curve.alpha_max;
      b.u = blend<double>(u_h, b.u_r, b.alpha);
      if ((x - home).norm() <= cs.config.home_radius) next = Phase::object_sensing;
      break;
    }
  }

  if (next != cs.phase) {
    s.phase = next;
    s.ticks_in_phase = 0;
    if (next == Phase::object_sensing) s.sensed_this_visit = false;
  } else {
    ++s.ticks_in_phase;
  }
  s.last_blend = b;
  r.command = b.u;
  return r;
}

bool episode_done(const ControllerState&, const SceneState& scene, const std::vector<PlanStep>& goals)
{
  if (!scene.pending_events.empty()) return false;
  for (const auto& g : goals)
    if (!step_satisfied(scene, g)) return false;
  return true;
}

bool step_satisfied(const SceneState& scene, const PlanStep& step)
{
  if (!scene.find_object(step.object)) return false;
  if (!step.pedestal) return scene.effector.attached && *scene.effector.attached == step.object;
  return object_on_pedestal(scene, step.object, *step.pedestal);
}

std::optional<std::size_t> current_step(const SceneState& scene, const std::vector<PlanStep>& plan)
{
  for (std::size_t i = 0; i < plan.size(); ++i)
    if (!step_satisfied(scene, plan[i])) return i;
  return std::nullopt;
}

}  // namespace vosa
