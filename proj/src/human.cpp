#include "vosa/human.hpp"

#include "vosa/error.hpp"

#include <algorithm>
#include <cmath>

namespace vosa {

namespace {

double noise_sigma(const HumanKind& k)
{
  return std::visit([](const auto& h) { return h.noise_sigma; }, k);
}

double deadzone(const HumanKind& k)
{
  if (const auto* g = std::get_if<GoalDirectedHuman>(&k)) return g->deadzone;
  if (const auto* c = std::get_if<CompliantHuman>(&k)) return c->deadzone;
  return 0.0;
}

enum class Stage { idle, reach, carry, release, rehome };

struct Intent {
  Stage stage = Stage::idle;
  Vec3 target = Vec3::Zero();
  GripperCommand gripper = GripperCommand::none;
};

Intent decide(const HumanModel& model, const SceneState& scene, const ControllerState& cs)
{
  Intent in;
  const auto idx = current_step(scene, model.plan);
  if (!idx) return in;
  const PlanStep& step = model.plan[*idx];
  const SceneObject* obj = scene.find_object(step.object);
  if (!obj) return in;  // not spawned yet

  const EndEffector& ee = scene.effector;
  const bool holding_target = ee.attached && *ee.attached == step.object;
  const Vec3& x = ee.position;

  if (cs.phase == Phase::active_sensing && !is_teleop(cs.mode)) {
    in.stage = Stage::rehome;
    in.target = ee.home;
    return in;
  }
  if (holding_target && step.pedestal) {
    const Pedestal* ped = scene.find_pedestal(*step.pedestal);
    if (!ped) return in;
    in.stage = Stage::carry;
    in.target = ped->position - ee.grasp_offset;
    if ((x - in.target).norm() <= model.traits.release_radius) in.gripper = GripperCommand::open;
    return in;
  }
  if (ee.attached || ee.gripper == Gripper::closed || cs.phase == Phase::placing) {
    // Wrong object in hand, or a missed grasp: let go and restart the cycle.
    in.stage = Stage::release;
    in.target = x;
    in.gripper = GripperCommand::open;
    return in;
  }
  in.stage = Stage::reach;
  in.target = obj->position;
  if (surface_distance(*obj, x) <= model.traits.grasp_trigger) in.gripper = GripperCommand::close;
  return in;
}

/// The intent the display highlights, in effector coordinates.
std::optional<Vec3> highlighted(const ControllerState& cs, const SceneState& scene)
{
  const auto& sel = cs.last_blend.selected_intent;
  if (!sel) return std::nullopt;
  if (cs.phase == Phase::placing) {
    if (*sel >= cs.config.placement_intents.size()) return std::nullopt;
    Vec3 g = cs.config.placement_intents[*sel];
    if (scene.effector.attached) g -= scene.effector.grasp_offset;
    return g;
  }
  if (*sel >= cs.grasp_intents.intents.size()) return std::nullopt;
  return cs.grasp_intents.intents[*sel];
}

}  // namespace

void HumanModel::validate() const
{
  const double sigma = noise_sigma(kind);
  if (!(sigma >= 0.0)) throw ConfigError("human noise_sigma must be >= 0");
  if (const auto* c = std::get_if<CompliantHuman>(&kind)) {
    if (!(c->cone_angle > 0.0 && c->cone_angle < M_PI)) throw ConfigError("compliant cone_angle must lie in (0, pi)");
    if (!(c->match_radius > 0.0)) throw ConfigError("compliant match_radius must be positive");
    if (!(c->min_assist_speed >= 0.0 && c->min_assist_speed <= 1.0))
      throw ConfigError("compliant min_assist_speed must lie in [0, 1]");
  }
  if (!(deadzone(kind) >= 0.0 && deadzone(kind) < 1.0)) throw ConfigError("human deadzone must lie in [0, 1)");
  if (traits.switch_ticks < 0) throw ConfigError("switch_ticks must be >= 0");
  if (!(traits.align_tolerance > 0.0 && traits.slow_radius > 0.0)) throw ConfigError("human tolerances must be positive");
  if (!(traits.min_deflection > 0.0 && traits.min_deflection <= 1.0))
    throw ConfigError("min_deflection must lie in (0, 1]");
}

const char* to_string(ControlMode m) { return m == ControlMode::xy ? "xy" : "z"; }

ControlMode control_mode_from_string(const std::string& s)
{
  if (s == "xy") return ControlMode::xy;
  if (s == "z") return ControlMode::z;
  throw ParseError("unknown control mode '" + s + "'");
}

std::string kind_name(const HumanKind& kind)
{
  if (std::holds_alternative<GoalDirectedHuman>(kind)) return "goal_directed";
  if (std::holds_alternative<StubbornHuman>(kind)) return "stubborn";
  return "compliant";
}

HumanOutput human_command(const HumanModel& model, const HumanState& hs, const SceneState& scene,
                          const ControllerState& cs, Rng& rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = noise_sigma(model.kind);
  const Vec3 noise(sigma * normal(rng), sigma * normal(rng), sigma * normal(rng));

  HumanOutput out;
  out.state = hs;
  const Intent in = decide(model, scene, cs);
  out.gripper = in.gripper;
  if (in.stage == Stage::idle || in.stage == Stage::release) return out;
  out.target = in.target;

  const HumanTraits& tr = model.traits;
  const Vec3& x = scene.effector.position;
  const Vec3 e = in.target - x;
  const double h = e.head<2>().norm();

  // Two-mode joystick: rise to the transit height before a long move,
  // traverse in xy, then settle in z.
  const double switch_back = hs.mode == ControlMode::z ? 2.0 * tr.align_tolerance : tr.align_tolerance;
  const bool traverse = h > switch_back;
  const double lift_from = tr.lift_distance - (hs.mode == ControlMode::z ? tr.align_tolerance : 0.0);
  const bool lift = traverse && h > lift_from && x.z() < tr.clearance_height - tr.align_tolerance;
  const ControlMode desired = traverse && !lift ? ControlMode::xy : ControlMode::z;
  const double z_goal = lift ? std::max(tr.clearance_height, in.target.z()) : in.target.z();
  if (desired != hs.mode) {
    out.state.mode = desired;
    out.state.switch_remaining = tr.switch_ticks;
  }
  if (out.state.switch_remaining > 0) {
    --out.state.switch_remaining;
    return out;
  }

  const bool stubborn = std::holds_alternative<StubbornHuman>(model.kind);
  const double step = scene.params.v_max * scene.params.dt;
  const BlendState& lb = cs.last_blend;
  // Assistance that did not advance along the driven axis gets pushed through.
  const Vec3 axis_dir = out.state.mode == ControlMode::xy
                            ? (h > 0.0 ? Vec3(e.x() / h, e.y() / h, 0.0) : Vec3::Zero())
                            : Vec3(0.0, 0.0, std::copysign(1.0, z_goal - x.z()));
  const bool resisted = lb.alpha > 0.0 && lb.u.dot(axis_dir) <= 0.0;
  auto deflection = [&](double err) {
    if (stubborn) return 1.0;
    if (resisted) return std::min(1.0, err / step);
    const double eased = std::clamp(err / tr.slow_radius, tr.min_deflection, 1.0);
    return std::min(eased, err / step);  // no overshoot
  };

  Vec3 u = Vec3::Zero();
  if (out.state.mode == ControlMode::xy) {
    if (h > 0.0) u.head<2>() = e.head<2>() / h * deflection(h);
    u.head<2>() += noise.head<2>();
  } else {
    const double dz = z_goal - x.z();
    if (dz != 0.0) u.z() = std::copysign(deflection(std::abs(dz)), dz);
    u.z() += noise.z();
  }
  u = clamp_unit(u);
  if (u.norm() < deadzone(model.kind)) u.setZero();

  if (const auto* c = std::get_if<CompliantHuman>(&model.kind)) {
    bool trusted = in.stage == Stage::rehome;
    if (!trusted) {
      const auto g = highlighted(cs, scene);
      trusted = g && (*g - in.target).norm() <= c->match_radius;
    }
    const bool fine = in.stage != Stage::rehome && e.norm() <= c->takeover_radius;
    if (trusted && !fine && lb.alpha > 0.0 && lb.u.norm() >= c->min_assist_speed &&
        angle_between<double>(lb.u, e) <= c->cone_angle)
      u.setZero();
  }
  out.u_h = u;
  return out;
}

}  // namespace vosa
