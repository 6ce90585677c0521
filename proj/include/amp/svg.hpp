#pragma once

#include <string>

#include "amp/planner.hpp"
#include "amp/trajectory.hpp"
#include "amp/world.hpp"

namespace amp {

/// Top-down view: obstacles, reference, executed path, and the selected
/// tubes (one circle per plan tick at the commanded pose).
void write_trajectory_svg(const std::string& path, const OccupancyGrid& grid,
                          const RefTrajectory& ref, const Trace& trace,
                          const PrimitiveLibrary& lib);

/// Margin radius and disturbance level over time.
void write_margin_svg(const std::string& path, const Trace& trace);

}  // namespace amp
