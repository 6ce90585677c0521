#pragma once

#include <string>
#include <vector>

#include "amp/config.hpp"
#include "amp/dynamics.hpp"
#include "amp/geom.hpp"
#include "amp/trajectory.hpp"

namespace amp {

struct PrimitiveSample {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double psi = 0.0;
};

/// A constant linear/angular velocity trajectory of fixed duration, expressed
/// in its own frame (start at the origin, heading 0, constant altitude).
/// Closed-form: an arc of radius v/omega when omega != 0, a line otherwise.
struct MotionPrimitive {
    int id = -1;
    double linear_speed = 0.0;   // [m/s]
    double angular_speed = 0.0;  // [rad/s]
    double t_f = 0.0;            // [s]
    double sample_period = 0.0;  // [s]
    Pose start;                  // always identity for library primitives
    std::vector<PrimitiveSample> samples;

    /// Closed-form local pose at time t (clamped to [0, t_f]).
    PrimitiveSample pose_at(double t) const;

    /// Closed-form local velocity at time t; zero beyond t_f.
    Vec3 velocity_at(double t) const;

    /// Pose in world coordinates when the primitive is placed at `anchor`.
    PrimitiveSample world_pose_at(const Pose& anchor, double t) const;

    /// Controller setpoint (pose + feedforward velocity/yaw-rate) when placed
    /// at `anchor`. Clamps to the final pose (zero velocity) beyond t_f.
    Setpoint setpoint_at(const Pose& anchor, double t) const;
};

struct PrimitiveLibrary {
    std::vector<MotionPrimitive> primitives;
    std::vector<double> speeds;
    std::vector<double> angular_speeds;

    std::size_t size() const { return primitives.size(); }
};

/// One primitive per (speed, angular_speed) pair, ids dense in grid order.
///
/// Throws ParamError if either set is empty, if t_f or sample_period are not
/// positive, or if the angular set lacks the straight (omega = 0) member.
PrimitiveLibrary generate_library(const std::vector<double>& speeds,
                                  const std::vector<double>& angular_speeds, double t_f,
                                  double sample_period);

/// Library from the configured speed set and symmetric angular-speed grid.
PrimitiveLibrary generate_library(const Config& cfg);

/// Time-averaged positional L1 distance between the primitive (placed at
/// `anchor` in the world) and the reference window starting at ref time `t0`,
/// evaluated on the primitive's sample grid by the trapezoidal rule.
///
/// Throws ParamError if [t0, t0 + t_f] does not overlap the reference span.
double j_sim(const MotionPrimitive& prim, const Pose& anchor, const RefTrajectory& ref, double t0);

/// CSV export (id, t, x, y, z, psi) for plotting.
void save_primitives_csv(const PrimitiveLibrary& lib, const std::string& path);

}  // namespace amp
