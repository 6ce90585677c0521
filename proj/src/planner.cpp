#include "amp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "amp/errors.hpp"
#include "amp/util.hpp"

namespace amp {

std::size_t ceil_to_grid(double sigma_hat, const std::vector<double>& grid) {
    if (sigma_hat < 0) throw ParamError("ceil_to_grid: sigma_hat must be >= 0");
    if (grid.empty()) throw ParamError("ceil_to_grid: grid must be nonempty");
    const auto it = std::lower_bound(grid.begin(), grid.end(), sigma_hat);
    if (it == grid.end())
        throw AboveGridError("ceil_to_grid: sigma " + fmt_double(sigma_hat) +
                             " above top grid level " + fmt_double(grid.back()));
    return static_cast<std::size_t>(it - grid.begin());
}

void PlanningContext::validate() const {
    if (!library || !lut || !grid || !reference)
        throw ConfigError("planner: context is missing library/lut/grid/reference");
    if (replan_rate <= 0) throw ConfigError("planner: replan_rate must be positive");
    if (library->primitives.size() != lut->primitives.size())
        throw ConfigError("planner: LUT and library sizes differ");
    for (std::size_t k = 0; k < library->primitives.size(); ++k)
        if (library->primitives[k].id != lut->primitives[k].id)
            throw ConfigError("planner: LUT and library primitive ids do not match at index " +
                              std::to_string(k));
}

PlanResult select_trajectory(const PlanningContext& ctx, const State& current, double sigma_hat) {
    ctx.validate();
    if (ctx.library->primitives.empty()) throw ParamError("select_trajectory: empty library");

    PlanResult result;
    result.sigma_hat = sigma_hat;

    std::size_t level = 0;
    if (!ctx.fixed_margin) {
        try {
            level = ceil_to_grid(sigma_hat, ctx.lut->sigma_levels);
        } catch (const AboveGridError&) {
            if (!ctx.above_grid_clamp) throw;
            level = ctx.lut->sigma_levels.size() - 1;
            result.clamped = true;
        }
        result.sigma_level = ctx.lut->sigma_levels[level];
    }

    const Pose anchor{current.position, current.yaw};
    const double t0 = std::clamp(current.time, ctx.reference->t_start(), ctx.reference->t_end());

    result.diagnostics.reserve(ctx.library->primitives.size());
    double best_cost = std::numeric_limits<double>::infinity();
    double best_abs_omega = std::numeric_limits<double>::infinity();
    const MotionPrimitive* best = nullptr;
    double best_theta = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t k = 0; k < ctx.library->primitives.size(); ++k) {
        const MotionPrimitive& prim = ctx.library->primitives[k];
        PrimitiveDiagnostic diag;
        diag.id = prim.id;
        diag.theta = ctx.fixed_margin ? *ctx.fixed_margin : ctx.lut->margin(k, level);
        diag.free = tube_is_free(*ctx.grid, prim, anchor, diag.theta, ctx.check_period);
        if (diag.free) {
            ++result.feasible_count;
            diag.cost = j_sim(prim, anchor, *ctx.reference, t0);
            const double abs_omega = std::abs(prim.angular_speed);
            const bool better =
                diag.cost < best_cost ||
                (diag.cost == best_cost &&
                 (abs_omega < best_abs_omega ||
                  (abs_omega == best_abs_omega && best && prim.id < best->id)));
            if (better) {
                best = &prim;
                best_cost = diag.cost;
                best_abs_omega = abs_omega;
                best_theta = diag.theta;
            }
        }
        result.diagnostics.push_back(diag);
    }

    if (best) {
        result.chosen_id = best->id;
        result.cost = best_cost;
        result.theta = best_theta;
    }
    return result;
}

Trace replan_loop(const PlanningContext& ctx, const State& initial, const SimStream& input,
                  const LoopParams& params, const Config& cfg) {
    ctx.validate();
    if (params.estimator_mode == EstimatorMode::kOracle && !input.sigma_oracle)
        throw ParamError("replan_loop: oracle mode requires input.sigma_oracle");

    const double tick_period = 1.0 / ctx.replan_rate;
    const int steps_per_control = static_cast<int>(std::round(cfg.control_period / cfg.sim_dt));
    const int steps_per_tick = static_cast<int>(std::round(tick_period / cfg.sim_dt));
    if (steps_per_tick <= 0 || steps_per_control <= 0 || steps_per_tick % steps_per_control != 0)
        throw ConfigError("replan_loop: control period must divide the tick period");
    const int n_ticks = static_cast<int>(std::round(params.duration * ctx.replan_rate));

    Trace trace;
    trace.states.reserve(static_cast<std::size_t>(n_ticks * steps_per_tick) + 1);

    DisturbanceEstimator estimator(cfg.estimator_window, params.hot_start_sigma);
    PidController pid(cfg);
    State state = initial;
    Control control = hover_control(cfg);
    State ctrl_prev_state = state;
    Control ctrl_prev_control = control;
    bool have_ctrl_prev = false;
    bool done = false;

    for (int tick = 0; tick < n_ticks && !done; ++tick) {
        const double tick_time = state.time;
        const double sigma_hat = (params.estimator_mode == EstimatorMode::kOracle)
                                     ? input.sigma_oracle(tick_time)
                                     : estimator.lookup_sigma();
        const PlanResult plan = select_trajectory(ctx, state, sigma_hat);

        PlanRecord rec;
        rec.tick = tick;
        rec.t = tick_time;
        rec.sigma_hat = sigma_hat;
        rec.sigma_level = plan.sigma_level;
        rec.chosen_id = plan.chosen_id.value_or(-1);
        rec.theta = plan.theta;
        rec.cost = plan.cost;
        rec.feasible_count = plan.feasible_count;
        rec.anchor = Pose{state.position, state.yaw};
        trace.plans.push_back(rec);
        const int plan_index = static_cast<int>(trace.plans.size()) - 1;

        const MotionPrimitive* active = nullptr;
        if (plan.chosen_id) {
            for (const auto& prim : ctx.library->primitives)
                if (prim.id == *plan.chosen_id) {
                    active = &prim;
                    break;
                }
        } else {
            ++trace.hold_ticks;
        }
        const Pose anchor = rec.anchor;
        const Setpoint hold{anchor.position, {}, anchor.yaw, 0.0};

        for (int i = 0; i < steps_per_tick; ++i) {
            const double t = state.time;
            if (i % steps_per_control == 0) {
                if (have_ctrl_prev && params.estimator_mode == EstimatorMode::kMovingWindow) {
                    const DisturbanceSample res =
                        residual(state, ctrl_prev_state, ctrl_prev_control, cfg.control_period, cfg);
                    estimator.add(t, res.acceleration.x, res.acceleration.y);
                }
                const Setpoint sp = active ? active->setpoint_at(anchor, t - tick_time) : hold;
                control = pid.update(state, sp, cfg.control_period);
                ctrl_prev_state = state;
                ctrl_prev_control = control;
                have_ctrl_prev = true;
            }
            trace.states.push_back({state, plan_index});
            const DisturbanceSample gust{input.wind(t), Frame::kWorld};
            state = step(state, control, gust, cfg.sim_dt, cfg);
            if (params.collided && params.collided(state)) {
                trace.collided = true;
                done = true;
                break;
            }
            if (params.stop && params.stop(state)) {
                trace.stopped_early = true;
                done = true;
                break;
            }
        }
    }
    trace.states.push_back({state, static_cast<int>(trace.plans.size()) - 1});
    trace.end_time = state.time;
    return trace;
}

void save_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("trace: cannot write " + path);
    out << "# tick,t,sigma_hat,sigma_level,chosen_id,theta,cost,feasible_count\n";
    for (const auto& r : trace.plans)
        out << r.tick << "," << fmt_double(r.t) << "," << fmt_double(r.sigma_hat) << ","
            << fmt_double(r.sigma_level) << "," << r.chosen_id << "," << fmt_double(r.theta) << ","
            << fmt_double(r.cost) << "," << r.feasible_count << "\n";
}

}  // namespace amp
