#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "amp/config.hpp"
#include "amp/planner.hpp"

namespace amp {

enum class MarginMode { kAdaptive, kStaticLow, kStaticHigh, kHandtuned };

MarginMode parse_margin_mode(const std::string& name);
const char* margin_mode_name(MarginMode mode);

/// One gust-study experiment: map + reference + wind levels + margin modes.
/// Loaded from a JSON file; paths are resolved relative to the file.
struct ExperimentSpec {
    std::string map_path;
    std::string lut_path;
    std::string reference_csv;       // empty when the line below is used
    Vec3 line_start{0, 0, 1};
    double line_yaw = 0.0;
    double line_speed = 1.0;
    double line_length = 22.0;
    WindKind wind_kind = WindKind::kDryden;
    double gaussian_sigma = 0.0;     // for WindKind::kGaussian
    std::vector<DrydenLevel> levels; // one campaign column per level
    std::vector<MarginMode> modes;   // one campaign row per mode
    double handtuned_theta = 0.15;
    EstimatorMode estimator_mode = EstimatorMode::kOracle;
    double oracle_horizon = 9.0;
    double hot_start_sigma = 0.0;
    int trials = 10;
    std::uint64_t base_seed = 7;
    double goal_x = 21.5;            // success = crossing this x-plane
    double time_limit_factor = 3.0;  // x nominal reference duration

    static ExperimentSpec load(const std::string& path);
};

/// Per-trial outcome metrics.
struct TrialMetrics {
    bool success = false;
    double avg_distance_to_reference = 0.0;  // [m]
    double within_margin_pct = 0.0;          // [%]
    double completion_time = 0.0;            // [s]
};

/// Assets shared by every trial of a campaign.
struct ExperimentAssets {
    PrimitiveLibrary library;
    MarginLUT lut;
    OccupancyGrid grid;
    RefTrajectory reference;

    static ExperimentAssets load(const ExperimentSpec& spec, const Config& cfg);
};

struct TrialOutput {
    TrialMetrics metrics;
    Trace trace;
    WindSeries wind;
};

/// One seeded closed-loop trial of `mode` under `level` turbulence.
TrialOutput run_trial(const ExperimentSpec& spec, const ExperimentAssets& assets,
                      MarginMode mode, DrydenLevel level, std::uint64_t seed, const Config& cfg);

struct CampaignCell {
    DrydenLevel level;
    MarginMode mode;
    std::vector<TrialMetrics> trials;
    std::vector<std::uint64_t> seeds;  // per-trial wind seeds, for replay

    double success_rate() const;  // [%]
    double mean_distance() const;
    double sd_distance() const;
    double mean_within_margin() const;
    double sd_within_margin() const;
    double mean_completion_time() const;
};

struct CampaignResult {
    std::vector<CampaignCell> cells;

    const CampaignCell& cell(DrydenLevel level, MarginMode mode) const;
    /// Aligned text table, one row per (level, mode).
    std::string render_table() const;
    /// Raw per-trial rows: level,mode,trial,seed,success,avg_distance,within_margin,completion_time.
    std::string raw_csv() const;
};

struct CampaignOptions {
    int trials = 0;                 // 0 = use spec.trials
    std::uint64_t seed_override = 0;  // 0 = use spec.base_seed
    unsigned workers = 0;
    std::string out_dir;            // when set: trials.csv, summary.txt, traces
    bool plots = false;
};

/// All (level, mode) cells x trials, trials parallelized. Wind seeds depend
/// only on (level, trial), so every margin mode faces identical gusts.
CampaignResult run_campaign(const ExperimentSpec& spec, const ExperimentAssets& assets,
                            const Config& cfg, const CampaignOptions& opts = {});

/// Parse mean/sd statistics back out of a raw campaign CSV (consistency
/// checks, post-processing).
CampaignResult campaign_from_raw_csv(const std::string& csv_text);

struct BenchReport {
    double selection_median_ms = 0.0;
    double selection_p95_ms = 0.0;
    double lookup_median_ms = 0.0;
    double lookup_p95_ms = 0.0;
    int repetitions = 0;

    std::string render() const;
};

/// Wall-time statistics for full trajectory selection and for the bare
/// margin lookup, over >= `reps` repetitions each.
BenchReport bench(const PlanningContext& ctx, const State& state, int reps = 1000);

}  // namespace amp
