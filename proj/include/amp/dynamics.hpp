#pragma once

#include "amp/config.hpp"
#include "amp/geom.hpp"

namespace amp {

/// Full vehicle state. Attitude angles are kept in (-pi, pi].
struct State {
    Vec3 position;        // [m], world frame
    Vec3 velocity;        // [m/s], world frame
    double roll = 0.0;    // [rad]
    double pitch = 0.0;   // [rad]
    double yaw = 0.0;     // [rad]
    double yaw_rate = 0.0;  // [rad/s]
    double time = 0.0;    // [s]
};

/// Attitude-level command: normalized collective thrust plus desired angles.
struct Control {
    double normalized_thrust = 0.0;  // in [0, 1]
    double desired_roll = 0.0;       // [rad]
    double desired_pitch = 0.0;      // [rad]
    double desired_yaw_rate = 0.0;   // [rad/s]
};

enum class Frame { kBody, kWorld };

/// Acceleration disturbance, tagged with the frame it is expressed in.
struct DisturbanceSample {
    Vec3 acceleration;  // [m/s^2]
    Frame frame = Frame::kWorld;
};

/// Time derivative of State (yaw rate is algebraic, time advances with the
/// integrator, so neither appears here).
struct StateDerivative {
    Vec3 d_position;
    Vec3 d_velocity;
    double d_roll = 0.0;
    double d_pitch = 0.0;
    double d_yaw = 0.0;
};

bool is_finite(const State& s);
bool is_finite(const Control& u);

/// Nominal model: velocity passthrough, thrust rotated by attitude minus
/// gravity, first-order lag from commanded to actual roll/pitch, and the
/// commanded yaw rate taken as the actual yaw rate.
///
/// Throws InvalidStateError on non-finite input.
StateDerivative nominal_dynamics(const State& state, const Control& control, const Config& cfg);

/// One fixed-step RK4 integration of the nominal model plus a world-frame
/// disturbance acceleration (body-tagged samples are rotated using the entry
/// state's attitude and held fixed over the step). Deterministic.
///
/// Throws ParamError if dt <= 0.
State step(const State& state, const Control& control, const DisturbanceSample& disturbance,
           double dt, const Config& cfg);

/// Control command that makes the nominal model hover at level attitude.
Control hover_control(const Config& cfg);

/// The pose/velocity/heading setpoint a controller tracks at one instant.
struct Setpoint {
    Vec3 position;
    Vec3 velocity;
    double yaw = 0.0;
    double yaw_rate = 0.0;
};

/// Cascaded position -> velocity -> attitude controller.
///
/// Position error feeds a desired velocity; velocity error (with integral and
/// derivative terms) feeds a desired acceleration, which is mapped to tilt
/// angles and collective thrust under the vehicle's yaw. All outputs are
/// saturated, so the controller never throws. Each closed-loop rollout owns
/// its controller instance; there is no shared state.
class PidController {
public:
    explicit PidController(const Config& cfg) : cfg_(cfg) {}

    Control update(const State& state, const Setpoint& ref, double dt);

    void reset();

private:
    Config cfg_;
    Vec3 integral_;
    Vec3 prev_vel_err_;
    bool has_prev_ = false;
};

}  // namespace amp
