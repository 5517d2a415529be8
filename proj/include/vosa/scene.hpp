#pragma once

#include "vosa/geometry.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vosa {

struct Sphere {
  double radius = 0.03;
};

/// Axis-aligned box.
struct Box {
  Vec3 half_extents = Vec3::Constant(0.03);
};

using Shape = std::variant<Sphere, Box>;

double bounding_radius(const Shape& shape);
double half_height(const Shape& shape);

struct SceneObject {
  std::string id;
  Shape shape;
  Vec3 position = Vec3::Zero();  // centroid
  bool graspable = true;
};

/// Euclidean distance from `p` to the object's surface; zero when inside.
double surface_distance(const SceneObject& object, const Vec3& p);

/// |signed distance| to the boundary, used to attribute points to surfaces.
double distance_to_boundary(const SceneObject& object, const Vec3& p);

bool contains(const SceneObject& object, const Vec3& p);

/// Placement region. `position` is the point an effector aims for when
/// setting an object down; the footprint test is horizontal.
struct Pedestal {
  std::string id;
  Vec3 position = Vec3::Zero();
  double radius = 0.06;
};

enum class Gripper { open, closed };
enum class GripperCommand { none, open, close };

struct EndEffector {
  Vec3 position = Vec3::Zero();
  Gripper gripper = Gripper::open;
  std::optional<std::string> attached;
  Vec3 grasp_offset = Vec3::Zero();  // attached centroid minus effector position
  Vec3 home = Vec3::Zero();
};

struct AddObject {
  SceneObject object;
};
struct RemoveObject {
  std::string id;
};
struct MoveObject {
  std::string id;
  Vec3 position = Vec3::Zero();
};

struct SpawnEvent {
  double time = 0.0;
  std::variant<AddObject, RemoveObject, MoveObject> action;
};

struct SceneParams {
  double z_table = 0.0;
  double v_max = 0.05;  // m/s
  double dt = 0.05;     // s
  double grasp_radius = 0.03;
};

enum class AnnotationKind {
  clamped_to_bounds,
  grasp_out_of_range,
  attached,
  detached,
  knocked,
  event_applied,
  event_skipped,
};

struct Annotation {
  AnnotationKind kind;
  std::string detail;
};

struct SceneState {
  double t = 0.0;
  std::vector<SceneObject> objects;
  std::vector<Pedestal> pedestals;
  EndEffector effector;
  Bounds bounds{Vec3(-0.5, -0.5, 0.0), Vec3(0.5, 0.5, 0.8)};
  std::vector<SpawnEvent> pending_events;  // sorted by time
  SceneParams params;
  std::vector<Annotation> annotations;  // produced by the most recent step

  const SceneObject* find_object(const std::string& id) const;
  SceneObject* find_object(const std::string& id);
  const Pedestal* find_pedestal(const std::string& id) const;
};

/// Advances the world by one timestep. Never throws: invalid grasps,
/// clamped motion and skipped events are reported through `annotations`.
SceneState step_scene(const SceneState& state, const Vec3& u, GripperCommand gripper_cmd, double dt);

/// Throws ConfigError when either id is unknown.
bool object_on_pedestal(const SceneState& state, const std::string& object_id,
                        const std::string& pedestal_id);

/// Structural checks (positive sizes, unique ids, ordered events whose
/// remove/move targets exist when they fire). Throws ConfigError.
void validate_scene(const SceneState& state);

/// Resting height of an object's centroid on the table.
double resting_z(const SceneState& state, const Shape& shape);

const char* to_string(AnnotationKind kind);
const char* to_string(GripperCommand cmd);
const char* to_string(Gripper g);
GripperCommand gripper_command_from_string(const std::string& s);

}  // namespace vosa
