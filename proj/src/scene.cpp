#include "vosa/scene.hpp"

#include "vosa/error.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace vosa {

namespace {

constexpr double kEventTimeSlack = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void apply_event(SceneState& s, const SpawnEvent& ev)
{
  auto is_attached = [&](const std::string& id) { return s.effector.attached && *s.effector.attached == id; };
  std::visit(overloaded{
                 [&](const AddObject& a) {
                   if (s.find_object(a.object.id)) {
                     s.annotations.push_back({AnnotationKind::event_skipped, "add " + a.object.id + ": id exists"});
                     return;
                   }
                   s.objects.push_back(a.object);
                   s.annotations.push_back({AnnotationKind::event_applied, "add " + a.object.id});
                 },
                 [&](const RemoveObject& r) {
                   auto it = std::find_if(s.objects.begin(), s.objects.end(),
                                          [&](const SceneObject& o) { return o.id == r.id; });
                   if (it == s.objects.end() || is_attached(r.id)) {
                     s.annotations.push_back({AnnotationKind::event_skipped, "remove " + r.id});
                     return;
                   }
                   s.objects.erase(it);
                   s.annotations.push_back({AnnotationKind::event_applied, "remove " + r.id});
                 },
                 [&](const MoveObject& m) {
                   SceneObject* o = s.find_object(m.id);
                   if (!o || is_attached(m.id)) {
                     s.annotations.push_back({AnnotationKind::event_skipped, "move " + m.id});
                     return;
                   }
                   o->position = m.position;
                   s.annotations.push_back({AnnotationKind::event_applied, "move " + m.id});
                 },
             },
             ev.action);
}

}  // namespace

double bounding_radius(const Shape& shape)
{
  return std::visit(overloaded{
                        [](const Sphere& s) { return s.radius; },
                        [](const Box& b) { return b.half_extents.norm(); },
                    },
                    shape);
}

double half_height(const Shape& shape)
{
  return std::visit(overloaded{
                        [](const Sphere& s) { return s.radius; },
                        [](const Box& b) { return b.half_extents.z(); },
                    },
                    shape);
}

double surface_distance(const SceneObject& object, const Vec3& p)
{
  const Vec3 q = p - object.position;
  return std::visit(overloaded{
                        [&](const Sphere& s) { return std::max(q.norm() - s.radius, 0.0); },
                        [&](const Box& b) { return (q.cwiseAbs() - b.half_extents).cwiseMax(0.0).norm(); },
                    },
                    object.shape);
}

double distance_to_boundary(const SceneObject& object, const Vec3& p)
{
  const Vec3 q = p - object.position;
  return std::visit(overloaded{
                        [&](const Sphere& s) { return std::abs(q.norm() - s.radius); },
                        [&](const Box& b) {
                          const Vec3 d = q.cwiseAbs() - b.half_extents;
                          if ((d.array() > 0.0).any()) return d.cwiseMax(0.0).norm();
                          return -d.maxCoeff();
                        },
                    },
                    object.shape);
}

bool contains(const SceneObject& object, const Vec3& p)
{
  const Vec3 q = p - object.position;
  return std::visit(overloaded{
                        [&](const Sphere& s) { return q.norm() < s.radius; },
                        [&](const Box& b) { return (q.cwiseAbs().array() < b.half_extents.array()).all(); },
                    },
                    object.shape);
}

const SceneObject* SceneState::find_object(const std::string& id) const
{
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

SceneObject* SceneState::find_object(const std::string& id)
{
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const Pedestal* SceneState::find_pedestal(const std::string& id) const
{
  for (const auto& p : pedestals)
    if (p.id == id) return &p;
  return nullptr;
}

double resting_z(const SceneState& state, const Shape& shape)
{
  return state.params.z_table + half_height(shape);
}

SceneState step_scene(const SceneState& state, const Vec3& u, GripperCommand gripper_cmd, double dt)
{
  SceneState next = state;
  next.annotations.clear();
  EndEffector& eff = next.effector;

  if (gripper_cmd == GripperCommand::close) {
    if (eff.gripper == Gripper::open && !eff.attached) {
      SceneObject* nearest = nullptr;
      double best = std::numeric_limits<double>::infinity();
      for (auto& o : next.objects) {
        if (!o.graspable) continue;
        const double d = surface_distance(o, eff.position);
        if (d < best) {
          best = d;
          nearest = &o;
        }
      }
      if (nearest && best <= next.params.grasp_radius) {
        eff.attached = nearest->id;
        eff.grasp_offset = nearest->position - eff.position;
        next.annotations.push_back({AnnotationKind::attached, nearest->id});
      } else {
        next.annotations.push_back({AnnotationKind::grasp_out_of_range, nearest ? nearest->id : ""});
      }
    } else {
      next.annotations.push_back({AnnotationKind::grasp_out_of_range, "gripper not open"});
    }
    eff.gripper = Gripper::closed;
  } else if (gripper_cmd == GripperCommand::open) {
    if (eff.attached) {
      if (SceneObject* o = next.find_object(*eff.attached)) {
        o->position.z() = resting_z(next, o->shape);
        next.annotations.push_back({AnnotationKind::detached, o->id});
      }
      eff.attached.reset();
      eff.grasp_offset.setZero();
    }
    eff.gripper = Gripper::open;
  }

  const Vec3 before = eff.position;
  const double n = u.norm();
  if (n > 0.0) {
    const Vec3 step = (n > 1.0 ? Vec3(u / n) : u) * (next.params.v_max * dt);
    const Vec3 target = before + step;
    eff.position = clamp_to(next.bounds, target);
    if (eff.position != target) next.annotations.push_back({AnnotationKind::clamped_to_bounds, ""});
  }

  for (auto& o : next.objects) {
    if (eff.attached && *eff.attached == o.id) {
      o.position = eff.position + eff.grasp_offset;
      continue;
    }
    if (contains(o, eff.position) && !contains(o, before))
      next.annotations.push_back({AnnotationKind::knocked, o.id});
  }

  next.t = state.t + dt;

  std::size_t applied = 0;
  while (applied < next.pending_events.size() &&
         next.pending_events[applied].time <= next.t + kEventTimeSlack) {
    apply_event(next, next.pending_events[applied]);
    ++applied;
  }
  next.pending_events.erase(next.pending_events.begin(), next.pending_events.begin() + applied);
  return next;
}

bool object_on_pedestal(const SceneState& state, const std::string& object_id, const std::string& pedestal_id)
{
  const SceneObject* o = state.find_object(object_id);
  if (!o) throw ConfigError("unknown object id '" + object_id + "'");
  const Pedestal* p = state.find_pedestal(pedestal_id);
  if (!p) throw ConfigError("unknown pedestal id '" + pedestal_id + "'");
  if (state.effector.attached && *state.effector.attached == object_id) return false;
  return horizontal_distance(o->position, p->position) <= p->radius;
}

void validate_scene(const SceneState& s)
{
  auto check_shape = [](const SceneObject& o) {
    const bool ok = std::visit(overloaded{
                                   [](const Sphere& sp) { return sp.radius > 0.0; },
                                   [](const Box& b) { return (b.half_extents.array() > 0.0).all(); },
                               },
                               o.shape);
    if (!ok) throw ConfigError("object '" + o.id + "' has non-positive size");
    if (!o.position.allFinite()) throw ConfigError("object '" + o.id + "' has non-finite position");
  };

  if (!(s.params.v_max > 0.0) || !(s.params.dt > 0.0) || !(s.params.grasp_radius > 0.0))
    throw ConfigError("v_max, dt and grasp_radius must be positive");
  if ((s.bounds.min().array() >= s.bounds.max().array()).any()) throw ConfigError("empty workspace bounds");
  if (!s.bounds.contains(s.effector.position)) throw ConfigError("effector outside workspace bounds");
  if (!s.bounds.contains(s.effector.home)) throw ConfigError("effector home outside workspace bounds");
  if (s.effector.attached && s.effector.gripper != Gripper::closed)
    throw ConfigError("attached object with open gripper");

  std::set<std::string> ids;
  for (const auto& o : s.objects) {
    check_shape(o);
    if (!ids.insert(o.id).second) throw ConfigError("duplicate object id '" + o.id + "'");
  }
  std::set<std::string> pids;
  for (std::size_t i = 0; i < s.pedestals.size(); ++i) {
    const auto& p = s.pedestals[i];
    if (!(p.radius > 0.0)) throw ConfigError("pedestal '" + p.id + "' has non-positive radius");
    if (!pids.insert(p.id).second) throw ConfigError("duplicate pedestal id '" + p.id + "'");
    for (std::size_t j = 0; j < i; ++j)
      if (s.pedestals[j].position == p.position) throw ConfigError("pedestal positions must be distinct");
  }

  double last = 0.0;
  for (const auto& ev : s.pending_events) {
    if (!(ev.time >= 0.0)) throw ConfigError("spawn event with negative time");
    if (ev.time < last) throw ConfigError("spawn events must be ordered by time");
    last = ev.time;
    std::visit(overloaded{
                   [&](const AddObject& a) {
                     check_shape(a.object);
                     if (!ids.insert(a.object.id).second)
                       throw ConfigError("spawn adds existing id '" + a.object.id + "'");
                   },
                   [&](const RemoveObject& r) {
                     if (!ids.erase(r.id)) throw ConfigError("spawn removes unknown id '" + r.id + "'");
                   },
                   [&](const MoveObject& m) {
                     if (!ids.count(m.id)) throw ConfigError("spawn moves unknown id '" + m.id + "'");
                   },
               },
               ev.action);
  }
}

const char* to_string(AnnotationKind kind)
{
  switch (kind) {
    case AnnotationKind::clamped_to_bounds: return "clamped_to_bounds";
    case AnnotationKind::grasp_out_of_range: return "grasp_out_of_range";
    case AnnotationKind::attached: return "attached";
    case AnnotationKind::detached: return "detached";
    case AnnotationKind::knocked: return "knocked";
    case AnnotationKind::event_applied: return "event_applied";
    case AnnotationKind::event_skipped: return "event_skipped";
  }
  return "?";
}

const char* to_string(GripperCommand cmd)
{
  switch (cmd) {
    case GripperCommand::none: return "none";
    case GripperCommand::open: return "open";
    case GripperCommand::close: return "close";
  }
  return "?";
}

const char* to_string(Gripper g)
{
  return g == Gripper::open ? "open" : "closed";
}

GripperCommand gripper_command_from_string(const std::string& s)
{
  if (s == "none") return GripperCommand::none;
  if (s == "open") return GripperCommand::open;
  if (s == "close") return GripperCommand::close;
  throw ParseError("unknown gripper command '" + s + "'");
}

const char* to_string(ErrorCategory c)
{
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::contract: return "contract";
    case ErrorCategory::io: return "io";
    case ErrorCategory::replay_mismatch: return "replay_mismatch";
  }
  return "?";
}

}  // namespace vosa
