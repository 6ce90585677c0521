#include "amp/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "amp/errors.hpp"
#include "amp/rng.hpp"
#include "amp/util.hpp"

namespace amp {

DisturbanceSample residual(const State& x_t, const State& x_prev, const Control& u_prev, double dt,
                           const Config& cfg) {
    if (dt <= 0.0) throw ParamError("residual: dt must be positive");
    const Vec3 accel_meas = (x_t.velocity - x_prev.velocity) * (1.0 / dt);
    const StateDerivative nominal = nominal_dynamics(x_prev, u_prev, cfg);
    const Vec3 r_world = accel_meas - nominal.d_velocity;
    const Vec3 r_body = rotate_rpy_inv(x_prev.roll, x_prev.pitch, x_prev.yaw, r_world);
    return {r_body, Frame::kBody};
}

void DisturbanceEstimator::add(double t, double gx, double gy) {
    while (!buf_.empty() && buf_.front().t < t - window_) {
        sum_x2_ -= static_cast<long double>(buf_.front().gx) * buf_.front().gx;
        sum_y2_ -= static_cast<long double>(buf_.front().gy) * buf_.front().gy;
        buf_.pop_front();
    }
    if (buf_.empty()) {
        sum_x2_ = 0.0L;
        sum_y2_ = 0.0L;
    }
    buf_.push_back({t, gx, gy});
    sum_x2_ += static_cast<long double>(gx) * gx;
    sum_y2_ += static_cast<long double>(gy) * gy;
}

double DisturbanceEstimator::sigma_x() const {
    if (buf_.empty()) return hot_start_;
    return std::sqrt(std::max(0.0, static_cast<double>(sum_x2_ / buf_.size())));
}

double DisturbanceEstimator::sigma_y() const {
    if (buf_.empty()) return hot_start_;
    return std::sqrt(std::max(0.0, static_cast<double>(sum_y2_ / buf_.size())));
}

Vec3 WindSeries::at(double t) const {
    if (ax.empty()) return {};
    const auto n = static_cast<std::ptrdiff_t>(ax.size());
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::floor(t / sample_period + 1e-9));
    k = std::clamp<std::ptrdiff_t>(k, 0, n - 1);
    return {ax[static_cast<std::size_t>(k)], ay[static_cast<std::size_t>(k)], 0.0};
}

double WindSeries::future_sigma(double t, double horizon) const {
    if (ax.empty()) return 0.0;
    const auto n = static_cast<std::ptrdiff_t>(ax.size());
    // samples with timestamps inside [t, t + horizon], one-ULP tolerant
    std::ptrdiff_t k0 = static_cast<std::ptrdiff_t>(std::ceil(t / sample_period - 1e-9));
    std::ptrdiff_t k1 =
        static_cast<std::ptrdiff_t>(std::floor((t + horizon) / sample_period + 1e-9));
    k0 = std::clamp<std::ptrdiff_t>(k0, 0, n - 1);
    k1 = std::clamp<std::ptrdiff_t>(k1, k0, n - 1);
    double sx = 0.0, sy = 0.0;
    for (std::ptrdiff_t k = k0; k <= k1; ++k) {
        sx += ax[static_cast<std::size_t>(k)] * ax[static_cast<std::size_t>(k)];
        sy += ay[static_cast<std::size_t>(k)] * ay[static_cast<std::size_t>(k)];
    }
    const double m = static_cast<double>(k1 - k0 + 1);
    return std::sqrt(std::max(sx, sy) / m);
}

WindSeries WindSeries::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("wind: cannot open " + path);
    WindSeries w;
    w.sample_period = 0.0;
    std::string line;
    double prev_t = 0.0;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double t, x, y;
        if (!(ss >> t >> x >> y)) throw IoError("wind: bad row in " + path + ": " + line);
        if (!first && w.sample_period == 0.0) w.sample_period = t - prev_t;
        prev_t = t;
        first = false;
        w.ax.push_back(x);
        w.ay.push_back(y);
    }
    if (w.ax.empty()) throw IoError("wind: empty series in " + path);
    if (w.sample_period <= 0.0) w.sample_period = 0.05;
    return w;
}

void WindSeries::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("wind: cannot write " + path);
    out << "# t,ax,ay\n";
    for (std::size_t k = 0; k < ax.size(); ++k)
        out << fmt_double(static_cast<double>(k) * sample_period) << "," << fmt_double(ax[k]) << ","
            << fmt_double(ay[k]) << "\n";
}

namespace {

std::size_t series_length(double duration, double sample_period) {
    if (duration <= 0.0) throw ParamError("wind: duration must be positive");
    if (sample_period <= 0.0) throw ParamError("wind: sample_period must be positive");
    return static_cast<std::size_t>(std::ceil(duration / sample_period)) + 1;
}

}  // namespace

WindSeries zero_wind(double duration, double sample_period) {
    WindSeries w;
    w.sample_period = sample_period;
    w.ax.assign(series_length(duration, sample_period), 0.0);
    w.ay.assign(w.ax.size(), 0.0);
    return w;
}

WindSeries gaussian_wind(double sigma, std::uint64_t seed, double duration, double sample_period) {
    if (sigma < 0) throw ParamError("wind: sigma must be >= 0");
    WindSeries w;
    w.sample_period = sample_period;
    const std::size_t n = series_length(duration, sample_period);
    w.ax.resize(n);
    w.ay.resize(n);
    GaussianSampler rng(seed);
    for (std::size_t k = 0; k < n; ++k) {
        w.ax[k] = sigma * rng.next();
        w.ay[k] = sigma * rng.next();
    }
    return w;
}

double dryden_intensity(DrydenLevel level, const Config& cfg) {
    switch (level) {
        case DrydenLevel::kLow: return cfg.dryden_sigma_low;
        case DrydenLevel::kMed: return cfg.dryden_sigma_med;
        case DrydenLevel::kHigh: return cfg.dryden_sigma_high;
    }
    throw ParamError("dryden: unknown level");
}

DrydenLevel parse_dryden_level(const std::string& name) {
    if (name == "low") return DrydenLevel::kLow;
    if (name == "med" || name == "medium") return DrydenLevel::kMed;
    if (name == "high") return DrydenLevel::kHigh;
    throw ParamError("dryden: unknown level '" + name + "' (expected low|med|high)");
}

const char* dryden_level_name(DrydenLevel level) {
    switch (level) {
        case DrydenLevel::kLow: return "low";
        case DrydenLevel::kMed: return "med";
        case DrydenLevel::kHigh: return "high";
    }
    return "?";
}

WindSeries dryden_wind(DrydenLevel level, std::uint64_t seed, double duration, const Config& cfg) {
    const double sigma = dryden_intensity(level, cfg);
    const double sp = cfg.dryden_sample_period;
    const std::size_t n = series_length(duration, sp);

    // Exact discretization of the first-order forming filter: stationary
    // variance equals sigma^2 for any sample period.
    const double a = std::exp(-sp / cfg.dryden_tau);
    const double b = std::sqrt(std::max(0.0, 1.0 - a * a));

    WindSeries w;
    w.sample_period = sp;
    w.ax.resize(n);
    w.ay.resize(n);
    GaussianSampler rng(seed);
    double x = rng.next();
    double y = rng.next();
    for (std::size_t k = 0; k < n; ++k) {
        w.ax[k] = sigma * x;
        w.ay[k] = sigma * y;
        x = a * x + b * rng.next();
        y = a * y + b * rng.next();
    }
    return w;
}

}  // namespace amp
