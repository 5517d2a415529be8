#pragma once

#include "vosa/controller.hpp"
#include "vosa/rng.hpp"
#include "vosa/scene.hpp"
#include "vosa/task.hpp"

#include <variant>
#include <vector>

namespace vosa {

/// Pursues the current target, easing off near it.
struct GoalDirectedHuman {
  double noise_sigma = 0.15;
  double deadzone = 0.02;
};

/// Full stick deflection toward the target, whatever the robot does.
struct StubbornHuman {
  double noise_sigma = 0.15;
};

/// Lets go of the stick while the highlighted intent is its goal and the
/// assisted motion already heads for it, but drives the final approach
/// itself. `min_assist_speed` bounds its patience: slower assistance is
/// treated as no assistance.
struct CompliantHuman {
  double cone_angle = 0.5;  // rad
  double noise_sigma = 0.15;
  double min_assist_speed = 0.5;  // |u| as a fraction of v_max
  double match_radius = 0.05;      // highlighted intent counts as the goal within this (m)
  double takeover_radius = 0.15;   // drives the final approach itself inside this (m)
  double deadzone = 0.02;
};

using HumanKind = std::variant<GoalDirectedHuman, StubbornHuman, CompliantHuman>;

/// Joystick habits shared by every kind.
struct HumanTraits {
  int switch_ticks = 12;          // ticks spent toggling between xy and z control
  double align_tolerance = 0.01;  // horizontal error at which xy control is done (m)
  double clearance_height = 0.12;  // transit height for long xy moves (m)
  double lift_distance = 0.15;     // horizontal moves shorter than this stay low (m)
  double slow_radius = 0.06;     // distance below which deflection eases off (m)
  double min_deflection = 0.3;   // floor for the eased deflection
  double grasp_trigger = 0.024;  // surface distance at which the user closes (m)
  double release_radius = 0.02;  // distance to the drop point at which the user opens (m)
};

struct HumanModel {
  HumanKind kind;
  std::vector<PlanStep> plan;
  HumanTraits traits;

  void validate() const;  // throws ConfigError
};

enum class ControlMode { xy, z };
const char* to_string(ControlMode m);
ControlMode control_mode_from_string(const std::string& s);

/// Input-device state carried between ticks.
struct HumanState {
  ControlMode mode = ControlMode::xy;
  int switch_remaining = 0;
};

struct HumanOutput {
  Vec3 u_h = Vec3::Zero();
  GripperCommand gripper = GripperCommand::none;
  HumanState state;
  Vec3 target = Vec3::Zero();  // where the user is steering; zero when idle
};

/// Deterministic given the rng stream. Three normal draws per call, so the
/// stream stays aligned regardless of what the user decides.
HumanOutput human_command(const HumanModel& model, const HumanState& hs, const SceneState& scene,
                          const ControllerState& cs, Rng& rng);

std::string kind_name(const HumanKind& kind);

}  // namespace vosa
