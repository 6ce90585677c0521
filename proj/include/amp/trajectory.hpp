#pragma once

#include <string>
#include <vector>

#include "amp/geom.hpp"

namespace amp {

struct TimedPose {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double psi = 0.0;
};

/// A timestamped reference path from a global planner (or a user-defined
/// segment). Sampled by linear interpolation; clamped outside its span.
class RefTrajectory {
public:
    RefTrajectory() = default;
    explicit RefTrajectory(std::vector<TimedPose> points);

    /// Straight constant-speed segment starting at `start` along `yaw`.
    static RefTrajectory line(const Vec3& start, double yaw, double speed, double length,
                              double sample_period = 0.1);

    const std::vector<TimedPose>& points() const { return points_; }
    double t_start() const { return points_.front().t; }
    double t_end() const { return points_.back().t; }

    TimedPose sample(double t) const;

    /// Shortest xy distance from a point to the reference polyline.
    double distance_xy(const Vec3& p) const;

    static RefTrajectory load_csv(const std::string& path);
    void save_csv(const std::string& path) const;

private:
    std::vector<TimedPose> points_;
};

}  // namespace amp
