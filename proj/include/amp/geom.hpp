#pragma once

#include <cmath>
#include <numbers>

namespace amp {

inline constexpr double kPi = std::numbers::pi;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double norm_xy() const { return std::sqrt(x * x + y * y); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

/// Rotate a vector about the z axis by yaw.
inline Vec3 rotate_z(double yaw, const Vec3& v) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

/// Body-to-world rotation for ZYX Euler angles (yaw about z, then pitch, then roll).
inline Vec3 rotate_rpy(double roll, double pitch, double yaw, const Vec3& v) {
    const double cr = std::cos(roll), sr = std::sin(roll);
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    return {(cy * cp) * v.x + (cy * sp * sr - sy * cr) * v.y + (cy * sp * cr + sy * sr) * v.z,
            (sy * cp) * v.x + (sy * sp * sr + cy * cr) * v.y + (sy * sp * cr - cy * sr) * v.z,
            (-sp) * v.x + (cp * sr) * v.y + (cp * cr) * v.z};
}

/// World-to-body rotation (transpose of rotate_rpy).
inline Vec3 rotate_rpy_inv(double roll, double pitch, double yaw, const Vec3& v) {
    const double cr = std::cos(roll), sr = std::sin(roll);
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    return {(cy * cp) * v.x + (sy * cp) * v.y + (-sp) * v.z,
            (cy * sp * sr - sy * cr) * v.x + (sy * sp * sr + cy * cr) * v.y + (cp * sr) * v.z,
            (cy * sp * cr + sy * sr) * v.x + (sy * sp * cr - cy * sr) * v.y + (cp * cr) * v.z};
}

/// A planar placement: position plus heading.
struct Pose {
    Vec3 position;
    double yaw = 0.0;
};

}  // namespace amp
