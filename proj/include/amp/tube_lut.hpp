#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amp/config.hpp"
#include "amp/dynamics.hpp"
#include "amp/primitives.hpp"

namespace amp {

/// Two-sided standard-normal quantile: the z with P(|X| <= z) = 1 - epsilon.
double two_sided_normal_quantile(double epsilon);

/// Monte Carlo rollouts of one primitive at one disturbance level, recorded
/// in the primitive's local frame.
struct RolloutSet {
    int primitive_id = -1;
    double sigma_g = 0.0;  // disturbance standard deviation [m/s^2]
    std::uint64_t seed_base = 0;
    std::vector<std::vector<State>> rollouts;
};

/// Closed-loop Monte Carlo rollouts: initial state drawn from the configured
/// spread around the primitive start, horizontal world-frame disturbance
/// redrawn i.i.d. from N(0, sigma_g^2) per axis every disturbance period and
/// held in between. Rollout r is seeded from (seed, primitive id, r), so the
/// set is independent of execution order and bit-reproducible.
///
/// Throws ParamError if n_mc < 2 or sigma_g < 0.
RolloutSet simulate_rollouts(const MotionPrimitive& prim, double sigma_g, int n_mc,
                             std::uint64_t seed, const Config& cfg);

/// Distance from a rollout state to the primitive's commanded point at the
/// same timestamp, measured in the plane perpendicular to the local tangent.
double cross_track_error(const State& s, const MotionPrimitive& prim, bool include_z);

/// Margin radius covering 1 - epsilon of the cross-track error: split
/// [0, t_f] into n_segments bins, fit a zero-mean normal per bin
/// (sigma_hat = root mean square error), take z(1 - epsilon) * sigma_hat,
/// and return the maximum over bins.
///
/// Throws FitError naming the first empty bin.
double fit_tube(const RolloutSet& rollouts, const MotionPrimitive& prim, double epsilon,
                int n_segments, bool include_z);

/// (primitive x variance level) -> margin radius table.
struct MarginLUT {
    int format_version = 1;
    double epsilon = 0.0;
    int n_mc = 0;
    double sample_period = 0.0;  // primitive sample period [s]
    std::vector<double> sigma_levels;  // ascending [m/s^2]
    struct PrimitiveInfo {
        int id;
        double linear_speed;
        double angular_speed;
        double t_f;
    };
    std::vector<PrimitiveInfo> primitives;
    std::vector<std::vector<double>> margins;  // [primitive][level], meters
    std::string config_hash;

    double margin(std::size_t prim_index, std::size_t level_index) const {
        return margins[prim_index][level_index];
    }

    /// Regenerate the motion primitive library this table was built for.
    PrimitiveLibrary rebuild_library() const;

    std::string to_json_string() const;
    static MarginLUT from_json_string(const std::string& text);
    void save(const std::string& path) const;
    static MarginLUT load(const std::string& path);
};

/// Per-cell diagnostics from a build (not serialized with the table).
struct BuildStats {
    /// Fraction of rollout states with cross-track error inside the fitted
    /// margin, per [primitive][level].
    std::vector<std::vector<double>> coverage;
};

/// Build the full table: margins[k][g] = fit_tube(simulate_rollouts(...)).
/// Cells run in parallel; per-rollout seed derivation makes the result
/// byte-identical for any worker count.
MarginLUT build_lut(const PrimitiveLibrary& lib, const std::vector<double>& sigma_levels,
                    const Config& cfg, unsigned workers = 0, BuildStats* stats = nullptr);

}  // namespace amp
