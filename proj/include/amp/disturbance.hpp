#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "amp/config.hpp"
#include "amp/dynamics.hpp"
#include "amp/geom.hpp"

namespace amp {

/// Body-frame acceleration residual between observed motion and the nominal
/// model over one controller interval:
///   (velocity(x_t) - velocity(x_prev)) / dt - f_accel(x_prev, u_prev),
/// rotated into the body frame of x_prev.
///
/// Throws ParamError if dt <= 0.
DisturbanceSample residual(const State& x_t, const State& x_prev, const Control& u_prev, double dt,
                           const Config& cfg);

/// Moving zero-mean variance of body-frame residual accelerations over a
/// sliding time window. Single writer; copies are cheap value snapshots.
class DisturbanceEstimator {
public:
    explicit DisturbanceEstimator(double window_duration, double hot_start_sigma = 0.0)
        : window_(window_duration), hot_start_(hot_start_sigma) {}

    /// Add a body-frame sample at time t (t must be newer than the last
    /// sample) and evict samples older than the window.
    void add(double t, double gx, double gy);

    /// Per-axis zero-mean standard deviations. Before any samples arrive
    /// both report the hot-start value.
    double sigma_x() const;
    double sigma_y() const;

    /// The value used for margin lookup: max(sigma_x, sigma_y).
    double lookup_sigma() const { return std::max(sigma_x(), sigma_y()); }

    std::size_t sample_count() const { return buf_.size(); }
    double window_duration() const { return window_; }

private:
    struct Entry {
        double t, gx, gy;
    };
    std::deque<Entry> buf_;
    double window_;
    double hot_start_;
    long double sum_x2_ = 0.0L;
    long double sum_y2_ = 0.0L;
};

// --- wind generators --------------------------------------------------------

enum class WindKind { kNone, kGaussian, kDryden };
enum class DrydenLevel { kLow, kMed, kHigh };

/// A horizontal acceleration disturbance series at a fixed sample period,
/// applied zero-order-hold. Deterministic for a fixed seed.
struct WindSeries {
    double sample_period = 0.05;  // [s]
    std::vector<double> ax;       // [m/s^2] world x
    std::vector<double> ay;       // [m/s^2] world y

    std::size_t size() const { return ax.size(); }
    double duration() const { return ax.empty() ? 0.0 : (ax.size() - 1) * sample_period; }

    /// Zero-order-hold sample (clamped at the ends).
    Vec3 at(double t) const;

    /// Zero-centered standard deviation of the window [t, t + horizon],
    /// per axis, maxed. This is the oracle disturbance level used by the
    /// margin-lookup oracle estimator mode.
    double future_sigma(double t, double horizon) const;

    static WindSeries load_csv(const std::string& path);
    void save_csv(const std::string& path) const;
};

/// All-zero series.
WindSeries zero_wind(double duration, double sample_period);

/// Independent N(0, sigma^2) draws per axis every sample period.
WindSeries gaussian_wind(double sigma, std::uint64_t seed, double duration, double sample_period);

/// Colored gusts from first-order forming filters: per axis an
/// Ornstein-Uhlenbeck chain with correlation time cfg.dryden_tau and
/// stationary standard deviation set by the level intensity. The filter is
/// initialized from its stationary distribution, so the series is stationary
/// from t = 0.
WindSeries dryden_wind(DrydenLevel level, std::uint64_t seed, double duration, const Config& cfg);

double dryden_intensity(DrydenLevel level, const Config& cfg);
DrydenLevel parse_dryden_level(const std::string& name);
const char* dryden_level_name(DrydenLevel level);

}  // namespace amp
