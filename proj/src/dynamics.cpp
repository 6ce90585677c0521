#include "amp/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "amp/errors.hpp"

namespace amp {

bool is_finite(const State& s) {
    return std::isfinite(s.position.x) && std::isfinite(s.position.y) &&
           std::isfinite(s.position.z) && std::isfinite(s.velocity.x) &&
           std::isfinite(s.velocity.y) && std::isfinite(s.velocity.z) && std::isfinite(s.roll) &&
           std::isfinite(s.pitch) && std::isfinite(s.yaw) && std::isfinite(s.yaw_rate) &&
           std::isfinite(s.time);
}

bool is_finite(const Control& u) {
    return std::isfinite(u.normalized_thrust) && std::isfinite(u.desired_roll) &&
           std::isfinite(u.desired_pitch) && std::isfinite(u.desired_yaw_rate);
}

namespace {

// Derivative evaluation without input validation; callers validate once.
StateDerivative eval_dynamics(const State& s, const Control& u, const Config& cfg) {
    StateDerivative d;
    d.d_position = s.velocity;
    const double thrust_accel = u.normalized_thrust * cfg.gravity / cfg.hover_thrust;
    const Vec3 thrust_world = rotate_rpy(s.roll, s.pitch, s.yaw, {0.0, 0.0, thrust_accel});
    d.d_velocity = {thrust_world.x, thrust_world.y, thrust_world.z - cfg.gravity};
    d.d_roll = (u.desired_roll - s.roll) / cfg.tau_attitude;
    d.d_pitch = (u.desired_pitch - s.pitch) / cfg.tau_attitude;
    d.d_yaw = u.desired_yaw_rate;
    return d;
}

State advance(const State& s, const StateDerivative& d, double h) {
    State out = s;
    out.position += d.d_position * h;
    out.velocity += d.d_velocity * h;
    out.roll += d.d_roll * h;
    out.pitch += d.d_pitch * h;
    out.yaw += d.d_yaw * h;
    return out;
}

}  // namespace

StateDerivative nominal_dynamics(const State& state, const Control& control, const Config& cfg) {
    if (!is_finite(state) || !is_finite(control))
        throw InvalidStateError("nominal_dynamics: non-finite state or control");
    return eval_dynamics(state, control, cfg);
}

State step(const State& state, const Control& control, const DisturbanceSample& disturbance,
           double dt, const Config& cfg) {
    if (dt <= 0.0) throw ParamError("step: dt must be positive");
    if (!is_finite(state) || !is_finite(control))
        throw InvalidStateError("step: non-finite state or control");

    Vec3 d_world = disturbance.acceleration;
    if (disturbance.frame == Frame::kBody)
        d_world = rotate_rpy(state.roll, state.pitch, state.yaw, d_world);

    auto f = [&](const State& s) {
        StateDerivative d = eval_dynamics(s, control, cfg);
        d.d_velocity += d_world;
        return d;
    };

    const StateDerivative k1 = f(state);
    const StateDerivative k2 = f(advance(state, k1, dt * 0.5));
    const StateDerivative k3 = f(advance(state, k2, dt * 0.5));
    const StateDerivative k4 = f(advance(state, k3, dt));

    State out = state;
    const double h = dt / 6.0;
    out.position += (k1.d_position + 2.0 * k2.d_position + 2.0 * k3.d_position + k4.d_position) * h;
    out.velocity += (k1.d_velocity + 2.0 * k2.d_velocity + 2.0 * k3.d_velocity + k4.d_velocity) * h;
    out.roll = wrap_angle(out.roll + (k1.d_roll + 2.0 * k2.d_roll + 2.0 * k3.d_roll + k4.d_roll) * h);
    out.pitch =
        wrap_angle(out.pitch + (k1.d_pitch + 2.0 * k2.d_pitch + 2.0 * k3.d_pitch + k4.d_pitch) * h);
    out.yaw = wrap_angle(out.yaw + (k1.d_yaw + 2.0 * k2.d_yaw + 2.0 * k3.d_yaw + k4.d_yaw) * h);
    out.yaw_rate = control.desired_yaw_rate;
    out.time = state.time + dt;
    return out;
}

Control hover_control(const Config& cfg) {
    Control u;
    u.normalized_thrust = cfg.hover_thrust;
    return u;
}

void PidController::reset() {
    integral_ = {};
    prev_vel_err_ = {};
    has_prev_ = false;
}

Control PidController::update(const State& state, const Setpoint& ref, double dt) {
    const Vec3 pos_err = ref.position - state.position;
    Vec3 vel_des = ref.velocity + cfg_.kp_pos * pos_err;
    const double vn = vel_des.norm();
    if (vn > cfg_.vel_cmd_limit) vel_des = vel_des * (cfg_.vel_cmd_limit / vn);

    const Vec3 vel_err = vel_des - state.velocity;
    if (dt > 0.0) {
        integral_ += vel_err * dt;
        integral_.x = std::clamp(integral_.x, -cfg_.int_limit, cfg_.int_limit);
        integral_.y = std::clamp(integral_.y, -cfg_.int_limit, cfg_.int_limit);
        integral_.z = std::clamp(integral_.z, -cfg_.int_limit, cfg_.int_limit);
    }
    Vec3 deriv;
    if (has_prev_ && dt > 0.0) deriv = (vel_err - prev_vel_err_) * (1.0 / dt);
    prev_vel_err_ = vel_err;
    has_prev_ = true;

    const Vec3 acc_des =
        cfg_.kp_vel * vel_err + cfg_.ki_vel * integral_ + cfg_.kd_vel * deriv;

    // Desired specific force, then tilt/thrust under the current yaw.
    const Vec3 f = {acc_des.x, acc_des.y, acc_des.z + cfg_.gravity};
    const double cy = std::cos(state.yaw), sy = std::sin(state.yaw);
    const double f1 = cy * f.x + sy * f.y;
    const double f2 = -sy * f.x + cy * f.y;
    const double f3 = std::max(f.z, 0.1 * cfg_.gravity);  // keep the tilt map well-posed

    Control u;
    u.desired_pitch = std::clamp(std::atan2(f1, f3), -cfg_.tilt_limit, cfg_.tilt_limit);
    u.desired_roll =
        std::clamp(std::atan2(-f2, std::sqrt(f1 * f1 + f3 * f3)), -cfg_.tilt_limit, cfg_.tilt_limit);
    const double thrust_accel = std::sqrt(f1 * f1 + f2 * f2 + f3 * f3);
    u.normalized_thrust =
        std::clamp(thrust_accel * cfg_.hover_thrust / cfg_.gravity, 0.0, 1.0);
    const double yaw_err = wrap_angle(ref.yaw - state.yaw);
    u.desired_yaw_rate = std::clamp(ref.yaw_rate + cfg_.kp_yaw * yaw_err, -cfg_.yaw_rate_limit,
                                    cfg_.yaw_rate_limit);
    return u;
}

}  // namespace amp
