#include "amp/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "amp/errors.hpp"
#include "amp/util.hpp"

namespace amp {

namespace {
constexpr double kOmegaZeroTol = 1e-12;
}

PrimitiveSample MotionPrimitive::pose_at(double t) const {
    t = std::clamp(t, 0.0, t_f);
    PrimitiveSample p;
    p.t = t;
    if (std::abs(angular_speed) < kOmegaZeroTol) {
        p.x = linear_speed * t;
        p.y = 0.0;
        p.psi = 0.0;
    } else {
        const double r = linear_speed / angular_speed;
        p.x = r * std::sin(angular_speed * t);
        p.y = r * (1.0 - std::cos(angular_speed * t));
        p.psi = wrap_angle(angular_speed * t);
    }
    p.z = 0.0;
    return p;
}

Vec3 MotionPrimitive::velocity_at(double t) const {
    if (t < 0.0 || t > t_f) return {};
    if (std::abs(angular_speed) < kOmegaZeroTol) return {linear_speed, 0.0, 0.0};
    return {linear_speed * std::cos(angular_speed * t), linear_speed * std::sin(angular_speed * t),
            0.0};
}

PrimitiveSample MotionPrimitive::world_pose_at(const Pose& anchor, double t) const {
    const PrimitiveSample local = pose_at(t);
    const Vec3 w = anchor.position + rotate_z(anchor.yaw, {local.x, local.y, local.z});
    return {local.t, w.x, w.y, w.z, wrap_angle(anchor.yaw + local.psi)};
}

Setpoint MotionPrimitive::setpoint_at(const Pose& anchor, double t) const {
    const PrimitiveSample w = world_pose_at(anchor, t);
    Setpoint sp;
    sp.position = {w.x, w.y, w.z};
    sp.yaw = w.psi;
    if (t <= t_f) {
        sp.velocity = rotate_z(anchor.yaw, velocity_at(t));
        sp.yaw_rate = angular_speed;
    }
    return sp;
}

PrimitiveLibrary generate_library(const std::vector<double>& speeds,
                                  const std::vector<double>& angular_speeds, double t_f,
                                  double sample_period) {
    if (speeds.empty() || angular_speeds.empty())
        throw ParamError("generate_library: speed and angular-speed sets must be nonempty");
    if (t_f <= 0 || sample_period <= 0)
        throw ParamError("generate_library: t_f and sample_period must be positive");
    const bool has_straight = std::any_of(angular_speeds.begin(), angular_speeds.end(),
                                          [](double w) { return std::abs(w) < kOmegaZeroTol; });
    if (!has_straight)
        throw ParamError("generate_library: angular-speed set must contain omega = 0");

    PrimitiveLibrary lib;
    lib.speeds = speeds;
    lib.angular_speeds = angular_speeds;
    const int n_samples = static_cast<int>(std::round(t_f / sample_period));
    int id = 0;
    for (double v : speeds) {
        if (v <= 0) throw ParamError("generate_library: speeds must be positive");
        for (double w : angular_speeds) {
            MotionPrimitive prim;
            prim.id = id++;
            prim.linear_speed = v;
            prim.angular_speed = w;
            prim.t_f = t_f;
            prim.sample_period = sample_period;
            prim.samples.reserve(static_cast<std::size_t>(n_samples) + 1);
            for (int i = 0; i <= n_samples; ++i) {
                const double t = (i == n_samples) ? t_f : i * sample_period;
                prim.samples.push_back(prim.pose_at(t));
            }
            lib.primitives.push_back(std::move(prim));
        }
    }
    return lib;
}

PrimitiveLibrary generate_library(const Config& cfg) {
    std::vector<double> omegas(static_cast<std::size_t>(cfg.omega_count));
    const std::int64_t half = cfg.omega_count / 2;
    for (std::int64_t j = 0; j < cfg.omega_count; ++j)
        omegas[static_cast<std::size_t>(j)] =
            (half == 0) ? 0.0 : static_cast<double>(j - half) * (cfg.omega_max / static_cast<double>(half));
    return generate_library(cfg.library_speeds, omegas, cfg.t_f, cfg.sample_period);
}

double j_sim(const MotionPrimitive& prim, const Pose& anchor, const RefTrajectory& ref, double t0) {
    if (prim.samples.size() < 2) throw ParamError("j_sim: primitive has no samples");
    if (t0 > ref.t_end() || t0 + prim.t_f < ref.t_start())
        throw ParamError("j_sim: no time overlap between primitive window and reference");

    double integral = 0.0;
    double prev_cost = 0.0;
    double prev_t = 0.0;
    for (std::size_t i = 0; i < prim.samples.size(); ++i) {
        const PrimitiveSample& s = prim.samples[i];
        const Vec3 p = anchor.position + rotate_z(anchor.yaw, {s.x, s.y, s.z});
        const TimedPose q = ref.sample(t0 + s.t);
        const double cost =
            std::abs(p.x - q.x) + std::abs(p.y - q.y) + std::abs(p.z - q.z);
        if (i > 0) integral += 0.5 * (cost + prev_cost) * (s.t - prev_t);
        prev_cost = cost;
        prev_t = s.t;
    }
    return integral / prim.t_f;
}

void save_primitives_csv(const PrimitiveLibrary& lib, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("primitives: cannot write " + path);
    out << "# id,t,x,y,z,psi\n";
    for (const auto& prim : lib.primitives)
        for (const auto& s : prim.samples)
            out << prim.id << "," << fmt_double(s.t) << "," << fmt_double(s.x) << ","
                << fmt_double(s.y) << "," << fmt_double(s.z) << "," << fmt_double(s.psi) << "\n";
}

}  // namespace amp
