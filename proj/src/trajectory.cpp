#include "amp/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "amp/errors.hpp"
#include "amp/util.hpp"

namespace amp {

RefTrajectory::RefTrajectory(std::vector<TimedPose> points) : points_(std::move(points)) {
    if (points_.empty()) throw ParamError("reference trajectory must have at least one point");
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (points_[i].t <= points_[i - 1].t)
            throw ParamError("reference trajectory timestamps must be strictly increasing");
}

RefTrajectory RefTrajectory::line(const Vec3& start, double yaw, double speed, double length,
                                  double sample_period) {
    if (speed <= 0 || length <= 0 || sample_period <= 0)
        throw ParamError("reference line: speed, length, sample_period must be positive");
    const double duration = length / speed;
    const int n = static_cast<int>(std::ceil(duration / sample_period));
    std::vector<TimedPose> pts;
    pts.reserve(static_cast<std::size_t>(n) + 1);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    for (int i = 0; i <= n; ++i) {
        const double t = std::min(i * sample_period, duration);
        pts.push_back({t, start.x + speed * t * cy, start.y + speed * t * sy, start.z, yaw});
        if (t >= duration) break;
    }
    return RefTrajectory(std::move(pts));
}

TimedPose RefTrajectory::sample(double t) const {
    if (t <= points_.front().t) {
        TimedPose p = points_.front();
        p.t = t;
        return p;
    }
    if (t >= points_.back().t) {
        TimedPose p = points_.back();
        p.t = t;
        return p;
    }
    const auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                     [](double v, const TimedPose& p) { return v < p.t; });
    const TimedPose& b = *it;
    const TimedPose& a = *(it - 1);
    const double u = (t - a.t) / (b.t - a.t);
    TimedPose out;
    out.t = t;
    out.x = a.x + u * (b.x - a.x);
    out.y = a.y + u * (b.y - a.y);
    out.z = a.z + u * (b.z - a.z);
    out.psi = a.psi + u * wrap_angle(b.psi - a.psi);
    return out;
}

double RefTrajectory::distance_xy(const Vec3& p) const {
    double best = std::hypot(p.x - points_[0].x, p.y - points_[0].y);
    for (std::size_t i = 1; i < points_.size(); ++i) {
        const double ax = points_[i - 1].x, ay = points_[i - 1].y;
        const double bx = points_[i].x, by = points_[i].y;
        const double dx = bx - ax, dy = by - ay;
        const double len2 = dx * dx + dy * dy;
        double u = 0.0;
        if (len2 > 0) u = std::clamp(((p.x - ax) * dx + (p.y - ay) * dy) / len2, 0.0, 1.0);
        best = std::min(best, std::hypot(p.x - (ax + u * dx), p.y - (ay + u * dy)));
    }
    return best;
}

RefTrajectory RefTrajectory::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("reference trajectory: cannot open " + path);
    std::vector<TimedPose> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        TimedPose p;
        if (!(ss >> p.t >> p.x >> p.y >> p.z >> p.psi))
            throw IoError("reference trajectory: bad row in " + path + ": " + line);
        pts.push_back(p);
    }
    return RefTrajectory(std::move(pts));
}

void RefTrajectory::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("reference trajectory: cannot write " + path);
    out << "# t,x,y,z,psi\n";
    for (const auto& p : points_)
        out << fmt_double(p.t) << "," << fmt_double(p.x) << "," << fmt_double(p.y) << ","
            << fmt_double(p.z) << "," << fmt_double(p.psi) << "\n";
}

}  // namespace amp
