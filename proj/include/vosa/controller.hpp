#pragma once

#include "vosa/arbitration.hpp"
#include "vosa/perception.hpp"
#include "vosa/prediction.hpp"
#include "vosa/rng.hpp"
#include "vosa/scene.hpp"
#include "vosa/task.hpp"

#include <string>
#include <variant>
#include <vector>

namespace vosa {

/// Assistance cycle: object_sensing -> grasping -> placing -> active_sensing -> object_sensing.
enum class Phase { object_sensing, grasping, placing, active_sensing };

Phase next_phase(Phase p);
/// Staying put or advancing one step around the cycle.
bool legal_transition(Phase from, Phase to);
const char* to_string(Phase p);
Phase phase_from_string(const std::string& s);

struct TeleopMode {};
/// Privileged but fixed intent list; may be incomplete or stale.
struct SagMode {
  std::vector<Vec3> static_intents;
};
struct VosaMode {};
using AssistMode = std::variant<TeleopMode, SagMode, VosaMode>;

std::string mode_name(const AssistMode& mode);
bool is_teleop(const AssistMode& mode);

struct ControllerConfig {
  ConfidenceWeights weights;
  ArbitrationCurve curve;
  PerceptionConfig perception;
  double home_radius = 0.05;
  std::vector<Vec3> placement_intents;  // known a priori

  void validate() const;
};

struct ControllerState {
  Phase phase = Phase::object_sensing;
  IntentSet grasp_intents;
  AssistMode mode;
  ControllerConfig config;
  BlendState last_blend;
  int ticks_in_phase = 0;
  bool sensed_this_visit = false;  // G refreshed since entering object_sensing
};

ControllerState make_controller(AssistMode mode, ControllerConfig config);

struct TickDiagnostics {
  Phase phase_before = Phase::object_sensing;
  bool sensing_attempted = false;
  bool gate_open = false;  // valid when sensing_attempted
  PerceptionStatus perception = PerceptionStatus::unchanged;
  bool intents_updated = false;
};

struct TickResult {
  Vec3 command = Vec3::Zero();
  GripperCommand gripper = GripperCommand::none;
  ControllerState state;
  TickDiagnostics diag;
};

/// One control step. Gripper commands are honored only where they drive the
/// cycle: close while grasping, open while placing.
TickResult controller_tick(const ControllerState& cs, const SceneState& scene, const Vec3& u_h,
                           GripperCommand gripper_cmd, Rng& rng);

/// Every goal holds and no spawn events are pending.
bool episode_done(const ControllerState& cs, const SceneState& scene, const std::vector<PlanStep>& goals);

}  // namespace vosa
