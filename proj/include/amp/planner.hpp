#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "amp/config.hpp"
#include "amp/disturbance.hpp"
#include "amp/dynamics.hpp"
#include "amp/primitives.hpp"
#include "amp/trajectory.hpp"
#include "amp/tube_lut.hpp"
#include "amp/world.hpp"

namespace amp {

/// Smallest grid level >= sigma_hat (the conservative ceiling rule).
/// Returns the index into the grid. Throws AboveGridError if sigma_hat
/// exceeds the top level; callers choose clamp vs. abort via policy.
std::size_t ceil_to_grid(double sigma_hat, const std::vector<double>& grid);

/// Everything static a planning tick needs. The LUT and library must list the
/// same primitive ids in the same order (checked at construction).
struct PlanningContext {
    const PrimitiveLibrary* library = nullptr;
    const MarginLUT* lut = nullptr;
    const OccupancyGrid* grid = nullptr;
    const RefTrajectory* reference = nullptr;
    double replan_rate = 5.0;   // [Hz]
    double check_period = 0.05;  // [s]
    bool above_grid_clamp = false;
    /// Bypass the LUT with one fixed margin for every primitive (the
    /// handtuned-margin baseline).
    std::optional<double> fixed_margin;

    void validate() const;
};

struct PrimitiveDiagnostic {
    int id = -1;
    double theta = 0.0;
    bool free = false;
    double cost = std::numeric_limits<double>::quiet_NaN();  // only computed when free
};

struct PlanResult {
    std::optional<int> chosen_id;
    double cost = std::numeric_limits<double>::quiet_NaN();
    double theta = std::numeric_limits<double>::quiet_NaN();  // margin of the chosen primitive
    double sigma_hat = 0.0;    // estimate fed to the lookup
    double sigma_level = 0.0;  // grid level actually queried
    bool clamped = false;      // sigma_hat was above the grid and clamp policy applied
    int feasible_count = 0;
    std::vector<PrimitiveDiagnostic> diagnostics;
};

/// One pass of margin lookup + collision filtering + cost minimization:
/// place every primitive at the vehicle pose, query its margin at the ceiled
/// disturbance level, keep the ones whose tube is free, and return the
/// minimum-J_sim primitive. Ties break toward lower |angular speed|, then
/// lower id. The reference window starts at the pose closest in time to the
/// current state.
PlanResult select_trajectory(const PlanningContext& ctx, const State& current, double sigma_hat);

enum class EstimatorMode { kMovingWindow, kOracle };

/// Inputs driving one closed-loop run.
struct SimStream {
    /// World-frame disturbance acceleration at time t.
    std::function<Vec3(double)> wind = [](double) { return Vec3{}; };
    /// Oracle disturbance level at time t (EstimatorMode::kOracle only).
    std::function<double(double)> sigma_oracle;
};

struct LoopParams {
    double duration = 30.0;  // [s]
    EstimatorMode estimator_mode = EstimatorMode::kMovingWindow;
    double hot_start_sigma = 0.0;
    /// Stop the run early when this returns true (e.g. goal line crossed).
    std::function<bool(const State&)> stop;
    /// Abort the run when this returns true (collision).
    std::function<bool(const State&)> collided;
};

struct PlanRecord {
    int tick = 0;
    double t = 0.0;
    double sigma_hat = 0.0;
    double sigma_level = 0.0;
    int chosen_id = -1;  // -1 = no feasible primitive (hold)
    double theta = std::numeric_limits<double>::quiet_NaN();
    double cost = std::numeric_limits<double>::quiet_NaN();
    int feasible_count = 0;
    Pose anchor;  // pose the chosen primitive was placed at
};

struct ExecutedState {
    State state;
    int plan_index = -1;  // index into Trace::plans active at this state
};

struct Trace {
    std::vector<PlanRecord> plans;
    std::vector<ExecutedState> states;
    bool collided = false;
    double end_time = 0.0;
    bool stopped_early = false;  // stop predicate fired
    int hold_ticks = 0;          // ticks with no feasible primitive
};

/// Fixed-rate replanning loop around select_trajectory: each tick refreshes
/// the disturbance estimate, selects a primitive anchored at the current
/// pose, and tracks it until the next tick. With no feasible primitive the
/// vehicle holds position and the tick is flagged. Infeasibility is data,
/// not an error.
Trace replan_loop(const PlanningContext& ctx, const State& initial, const SimStream& input,
                  const LoopParams& params, const Config& cfg);

/// Plan trace CSV: tick,t,sigma_hat,sigma_level,chosen_id,theta,cost,feasible_count.
void save_trace_csv(const Trace& trace, const std::string& path);

}  // namespace amp
