#pragma once

#include "vosa/scene.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vosa {

/// One item of a human's plan and, equivalently, one scenario goal: put
/// `object` on `pedestal`, or just hold it when no pedestal is named.
struct PlanStep {
  std::string object;
  std::optional<std::string> pedestal;
};

/// False (rather than an error) for objects that have not spawned yet.
bool step_satisfied(const SceneState& scene, const PlanStep& step);

/// Index of the first unsatisfied step, or nullopt when the plan is done.
std::optional<std::size_t> current_step(const SceneState& scene, const std::vector<PlanStep>& plan);

}  // namespace vosa
