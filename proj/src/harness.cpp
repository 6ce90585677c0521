#include "amp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "amp/errors.hpp"
#include "amp/parallel.hpp"
#include "amp/rng.hpp"
#include "amp/svg.hpp"
#include "amp/util.hpp"

namespace amp {

namespace fs = std::filesystem;

MarginMode parse_margin_mode(const std::string& name) {
    if (name == "adaptive") return MarginMode::kAdaptive;
    if (name == "static_low") return MarginMode::kStaticLow;
    if (name == "static_high") return MarginMode::kStaticHigh;
    if (name == "handtuned") return MarginMode::kHandtuned;
    throw ParamError("harness: unknown margin mode '" + name + "'");
}

const char* margin_mode_name(MarginMode mode) {
    switch (mode) {
        case MarginMode::kAdaptive: return "adaptive";
        case MarginMode::kStaticLow: return "static_low";
        case MarginMode::kStaticHigh: return "static_high";
        case MarginMode::kHandtuned: return "handtuned";
    }
    return "?";
}

namespace {

std::string resolve(const fs::path& base_dir, const std::string& p) {
    if (p.empty()) return p;
    fs::path path(p);
    if (path.is_absolute()) return p;
    return (base_dir / path).string();
}

}  // namespace

ExperimentSpec ExperimentSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("experiment spec: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("experiment spec: malformed JSON in " + path + ": " + e.what());
    }
    const fs::path base_dir = fs::path(path).parent_path();

    ExperimentSpec spec;
    try {
        spec.map_path = resolve(base_dir, j.at("map").get<std::string>());
        spec.lut_path = resolve(base_dir, j.at("lut").get<std::string>());

        const auto& ref = j.at("reference");
        const std::string type = ref.at("type").get<std::string>();
        if (type == "line") {
            const auto start = ref.at("start").get<std::vector<double>>();
            if (start.size() != 3) throw IoError("experiment spec: reference.start needs 3 values");
            spec.line_start = {start[0], start[1], start[2]};
            spec.line_yaw = ref.value("yaw", 0.0);
            spec.line_speed = ref.at("speed").get<double>();
            spec.line_length = ref.at("length").get<double>();
        } else if (type == "csv") {
            spec.reference_csv = resolve(base_dir, ref.at("path").get<std::string>());
        } else {
            throw IoError("experiment spec: reference.type must be 'line' or 'csv'");
        }

        const auto& wind = j.at("wind");
        const std::string kind = wind.at("kind").get<std::string>();
        if (kind == "dryden") {
            spec.wind_kind = WindKind::kDryden;
            spec.levels.clear();
            for (const auto& name : wind.at("levels"))
                spec.levels.push_back(parse_dryden_level(name.get<std::string>()));
        } else if (kind == "gaussian") {
            spec.wind_kind = WindKind::kGaussian;
            spec.gaussian_sigma = wind.at("sigma").get<double>();
            spec.levels = {DrydenLevel::kLow};
        } else if (kind == "none") {
            spec.wind_kind = WindKind::kNone;
            spec.levels = {DrydenLevel::kLow};
        } else {
            throw IoError("experiment spec: wind.kind must be dryden|gaussian|none");
        }
        if (spec.levels.empty()) throw IoError("experiment spec: wind.levels must be nonempty");

        spec.modes.clear();
        for (const auto& name : j.at("modes"))
            spec.modes.push_back(parse_margin_mode(name.get<std::string>()));
        if (spec.modes.empty()) throw IoError("experiment spec: modes must be nonempty");
        spec.handtuned_theta = j.value("handtuned_theta", 0.15);

        if (j.contains("estimator")) {
            const auto& est = j.at("estimator");
            const std::string mode = est.value("mode", "oracle");
            if (mode == "oracle")
                spec.estimator_mode = EstimatorMode::kOracle;
            else if (mode == "window")
                spec.estimator_mode = EstimatorMode::kMovingWindow;
            else
                throw IoError("experiment spec: estimator.mode must be oracle|window");
            spec.oracle_horizon = est.value("horizon", 9.0);
            spec.hot_start_sigma = est.value("hot_start", 0.0);
        }

        spec.trials = j.value("trials", 10);
        spec.base_seed = j.value("seed", std::uint64_t{7});
        spec.goal_x = j.at("goal_x").get<double>();
        spec.time_limit_factor = j.value("time_limit_factor", 3.0);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("experiment spec: missing or mistyped field in " + path + ": " + e.what());
    }
    if (spec.trials < 1) throw IoError("experiment spec: trials must be >= 1");
    return spec;
}

ExperimentAssets ExperimentAssets::load(const ExperimentSpec& spec, const Config& cfg) {
    ExperimentAssets assets;
    assets.lut = MarginLUT::load(spec.lut_path);
    assets.library = assets.lut.rebuild_library();
    assets.grid = load_map(spec.map_path);
    if (!spec.reference_csv.empty())
        assets.reference = RefTrajectory::load_csv(spec.reference_csv);
    else
        assets.reference = RefTrajectory::line(spec.line_start, spec.line_yaw, spec.line_speed,
                                               spec.line_length, cfg.sample_period);
    return assets;
}

namespace {

/// Cross-track error of an executed state against the primitive commanded at
/// its tick, in the plane perpendicular to the commanded heading.
double executed_cross_track(const State& s, const PlanRecord& rec, const MotionPrimitive& prim,
                            bool include_z) {
    const PrimitiveSample ref = prim.world_pose_at(rec.anchor, s.time - rec.t);
    const double cy = std::cos(ref.psi), sy = std::sin(ref.psi);
    Vec3 e = {s.position.x - ref.x, s.position.y - ref.y, s.position.z - ref.z};
    const double along = e.x * cy + e.y * sy;
    e.x -= along * cy;
    e.y -= along * sy;
    if (!include_z) e.z = 0.0;
    return e.norm();
}

}  // namespace

TrialOutput run_trial(const ExperimentSpec& spec, const ExperimentAssets& assets,
                      MarginMode mode, DrydenLevel level, std::uint64_t seed, const Config& cfg) {
    const double nominal_duration = assets.reference.t_end() - assets.reference.t_start();
    const double time_limit = spec.time_limit_factor * nominal_duration;

    TrialOutput out;
    switch (spec.wind_kind) {
        case WindKind::kNone:
            out.wind = zero_wind(time_limit + spec.oracle_horizon + 1.0, cfg.dryden_sample_period);
            break;
        case WindKind::kGaussian:
            out.wind = gaussian_wind(spec.gaussian_sigma, seed,
                                     time_limit + spec.oracle_horizon + 1.0,
                                     cfg.disturbance_period);
            break;
        case WindKind::kDryden:
            out.wind = dryden_wind(level, seed, time_limit + spec.oracle_horizon + 1.0, cfg);
            break;
    }

    PlanningContext ctx;
    ctx.library = &assets.library;
    ctx.lut = &assets.lut;
    ctx.grid = &assets.grid;
    ctx.reference = &assets.reference;
    ctx.replan_rate = cfg.replan_rate;
    ctx.check_period = cfg.check_period;
    ctx.above_grid_clamp = true;  // campaign policy: clamp and flag, never abort mid-flight
    if (mode == MarginMode::kHandtuned) ctx.fixed_margin = spec.handtuned_theta;

    SimStream input;
    const WindSeries& wind = out.wind;
    input.wind = [&wind](double t) { return wind.at(t); };

    LoopParams params;
    params.duration = time_limit;
    params.estimator_mode = EstimatorMode::kOracle;
    switch (mode) {
        case MarginMode::kAdaptive:
            params.estimator_mode = spec.estimator_mode;
            params.hot_start_sigma = spec.hot_start_sigma;
            if (spec.estimator_mode == EstimatorMode::kOracle) {
                const double horizon = spec.oracle_horizon;
                input.sigma_oracle = [&wind, horizon](double t) {
                    return wind.future_sigma(t, horizon);
                };
            }
            break;
        case MarginMode::kStaticLow: {
            const double lo = assets.lut.sigma_levels.front();
            input.sigma_oracle = [lo](double) { return lo; };
            break;
        }
        case MarginMode::kStaticHigh: {
            const double hi = assets.lut.sigma_levels.back();
            input.sigma_oracle = [hi](double) { return hi; };
            break;
        }
        case MarginMode::kHandtuned: {
            input.sigma_oracle = [](double) { return 0.0; };
            break;
        }
    }

    const OccupancyGrid& grid = assets.grid;
    const double goal_x = spec.goal_x;
    params.stop = [goal_x](const State& s) { return s.position.x >= goal_x; };
    params.collided = [&grid](const State& s) {
        return !grid.point_free(s.position.x, s.position.y);
    };

    const TimedPose start = assets.reference.sample(assets.reference.t_start());
    State initial;
    initial.position = {start.x, start.y, start.z};
    initial.yaw = start.psi;
    initial.velocity = rotate_z(start.psi, {spec.line_speed, 0.0, 0.0});
    if (!spec.reference_csv.empty()) {
        // generic reference: start at its initial motion direction
        const TimedPose next = assets.reference.sample(assets.reference.t_start() + 0.2);
        const Vec3 d{next.x - start.x, next.y - start.y, next.z - start.z};
        const double n = d.norm();
        initial.velocity = n > 1e-9 ? d * (1.0 / (0.2)) : Vec3{};
    }

    out.trace = replan_loop(ctx, initial, input, params, cfg);

    TrialMetrics m;
    m.success = out.trace.stopped_early && !out.trace.collided;
    m.completion_time = m.success ? out.trace.end_time : time_limit;

    double dist_sum = 0.0;
    std::size_t within = 0, margin_samples = 0;
    for (const auto& es : out.trace.states) {
        dist_sum += assets.reference.distance_xy(es.state.position);
        if (es.plan_index >= 0) {
            const PlanRecord& rec = out.trace.plans[static_cast<std::size_t>(es.plan_index)];
            if (rec.chosen_id >= 0) {
                const MotionPrimitive& prim =
                    assets.library.primitives[static_cast<std::size_t>(rec.chosen_id)];
                const double err =
                    executed_cross_track(es.state, rec, prim, cfg.cross_track_include_z);
                if (err <= rec.theta) ++within;
                ++margin_samples;
            }
        }
    }
    m.avg_distance_to_reference =
        out.trace.states.empty() ? 0.0 : dist_sum / static_cast<double>(out.trace.states.size());
    m.within_margin_pct =
        margin_samples ? 100.0 * static_cast<double>(within) / static_cast<double>(margin_samples)
                       : 0.0;
    out.metrics = m;
    return out;
}

double CampaignCell::success_rate() const {
    if (trials.empty()) return 0.0;
    std::size_t n = 0;
    for (const auto& t : trials) n += t.success ? 1 : 0;
    return 100.0 * static_cast<double>(n) / static_cast<double>(trials.size());
}

namespace {

double mean_of(const std::vector<TrialMetrics>& v, double TrialMetrics::* field) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (const auto& t : v) s += t.*field;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<TrialMetrics>& v, double TrialMetrics::* field) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v, field);
    double s = 0.0;
    for (const auto& t : v) s += (t.*field - m) * (t.*field - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

double CampaignCell::mean_distance() const {
    return mean_of(trials, &TrialMetrics::avg_distance_to_reference);
}
double CampaignCell::sd_distance() const {
    return sd_of(trials, &TrialMetrics::avg_distance_to_reference);
}
double CampaignCell::mean_within_margin() const {
    return mean_of(trials, &TrialMetrics::within_margin_pct);
}
double CampaignCell::sd_within_margin() const {
    return sd_of(trials, &TrialMetrics::within_margin_pct);
}
double CampaignCell::mean_completion_time() const {
    return mean_of(trials, &TrialMetrics::completion_time);
}

const CampaignCell& CampaignResult::cell(DrydenLevel level, MarginMode mode) const {
    for (const auto& c : cells)
        if (c.level == level && c.mode == mode) return c;
    throw ParamError("campaign: no such cell");
}

std::string CampaignResult::render_table() const {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-6s %-12s %9s %22s %22s %12s\n", "Level", "Margin",
                  "Success%", "AvgDistToRef(m)", "WithinMargin(%)", "MeanTime(s)");
    out << buf;
    out << std::string(88, '-') << "\n";
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof(buf), "%-6s %-12s %9.0f %13.3f +- %5.3f %14.2f +- %4.2f %12.2f\n",
                      dryden_level_name(c.level), margin_mode_name(c.mode), c.success_rate(),
                      c.mean_distance(), c.sd_distance(), c.mean_within_margin(),
                      c.sd_within_margin(), c.mean_completion_time());
        out << buf;
    }
    return out.str();
}

std::string CampaignResult::raw_csv() const {
    std::ostringstream out;
    out << "# level,mode,trial,seed,success,avg_distance,within_margin,completion_time\n";
    for (const auto& c : cells)
        for (std::size_t i = 0; i < c.trials.size(); ++i) {
            const auto& t = c.trials[i];
            const std::uint64_t seed = i < c.seeds.size() ? c.seeds[i] : 0;
            out << dryden_level_name(c.level) << "," << margin_mode_name(c.mode) << "," << i << ","
                << seed << "," << t.success << "," << fmt_double(t.avg_distance_to_reference)
                << "," << fmt_double(t.within_margin_pct) << ","
                << fmt_double(t.completion_time) << "\n";
        }
    return out.str();
}

CampaignResult run_campaign(const ExperimentSpec& spec, const ExperimentAssets& assets,
                            const Config& cfg, const CampaignOptions& opts) {
    const int trials = opts.trials > 0 ? opts.trials : spec.trials;
    if (trials < 1) throw ParamError("campaign: trials must be >= 1");
    const std::uint64_t base_seed = opts.seed_override ? opts.seed_override : spec.base_seed;

    CampaignResult result;
    for (const auto level : spec.levels)
        for (const auto mode : spec.modes) {
            CampaignCell cell;
            cell.level = level;
            cell.mode = mode;
            cell.trials.resize(static_cast<std::size_t>(trials));
            cell.seeds.resize(static_cast<std::size_t>(trials), 0);
            result.cells.push_back(std::move(cell));
        }

    const bool write_out = !opts.out_dir.empty();
    if (write_out) fs::create_directories(opts.out_dir);

    const std::size_t n_cells = result.cells.size();
    parallel_for(n_cells * static_cast<std::size_t>(trials), opts.workers, [&](std::size_t task) {
        const std::size_t ci = task / static_cast<std::size_t>(trials);
        const int trial = static_cast<int>(task % static_cast<std::size_t>(trials));
        CampaignCell& cell = result.cells[ci];
        // Wind depends on (level, trial) only, so all margin modes in a
        // column face the same gust sequences.
        std::size_t level_index = 0;
        for (std::size_t i = 0; i < spec.levels.size(); ++i)
            if (spec.levels[i] == cell.level) level_index = i;
        const std::uint64_t seed =
            derive_seed(base_seed, level_index, static_cast<std::uint64_t>(trial));
        TrialOutput out = run_trial(spec, assets, cell.mode, cell.level, seed, cfg);
        cell.trials[static_cast<std::size_t>(trial)] = out.metrics;
        cell.seeds[static_cast<std::size_t>(trial)] = seed;
        if (write_out) {
            const std::string stem = std::string(dryden_level_name(cell.level)) + "_" +
                                     margin_mode_name(cell.mode) + "_" + std::to_string(trial);
            save_trace_csv(out.trace, opts.out_dir + "/trace_" + stem + ".csv");
            if (opts.plots) {
                write_trajectory_svg(opts.out_dir + "/traj_" + stem + ".svg", assets.grid,
                                     assets.reference, out.trace, assets.library);
                write_margin_svg(opts.out_dir + "/margin_" + stem + ".svg", out.trace);
            }
        }
    });

    if (write_out) {
        std::ofstream raw(opts.out_dir + "/trials.csv");
        if (!raw) throw IoError("campaign: cannot write " + opts.out_dir + "/trials.csv");
        raw << result.raw_csv();
        std::ofstream summary(opts.out_dir + "/summary.txt");
        summary << result.render_table();
    }
    return result;
}

CampaignResult campaign_from_raw_csv(const std::string& csv_text) {
    CampaignResult result;
    std::istringstream in(csv_text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::string level_name, mode_name;
        int trial = 0, success = 0;
        std::uint64_t seed = 0;
        TrialMetrics m;
        if (!(ss >> level_name >> mode_name >> trial >> seed >> success >>
              m.avg_distance_to_reference >> m.within_margin_pct >> m.completion_time))
            throw IoError("campaign csv: bad row: " + line);
        m.success = success != 0;
        const DrydenLevel level = parse_dryden_level(level_name);
        const MarginMode mode = parse_margin_mode(mode_name);
        CampaignCell* cell = nullptr;
        for (auto& c : result.cells)
            if (c.level == level && c.mode == mode) cell = &c;
        if (!cell) {
            CampaignCell fresh;
            fresh.level = level;
            fresh.mode = mode;
            result.cells.push_back(std::move(fresh));
            cell = &result.cells.back();
        }
        cell->trials.push_back(m);
        cell->seeds.push_back(seed);
    }
    return result;
}

std::string BenchReport::render() const {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-28s %12s %12s\n", "Procedure", "median(ms)", "p95(ms)");
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-28s %12.3f %12.3f\n", "trajectory selection",
                  selection_median_ms, selection_p95_ms);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-28s %12.4f %12.4f\n", "margin lookup", lookup_median_ms,
                  lookup_p95_ms);
    out << buf;
    std::snprintf(buf, sizeof(buf), "(%d repetitions each)\n", repetitions);
    out << buf;
    return out.str();
}

BenchReport bench(const PlanningContext& ctx, const State& state, int reps) {
    ctx.validate();
    if (reps < 1) throw ParamError("bench: reps must be >= 1");
    using clock = std::chrono::steady_clock;

    BenchReport report;
    report.repetitions = reps;
    const auto percentile = [](std::vector<double>& v, double p) {
        std::sort(v.begin(), v.end());
        const std::size_t idx = static_cast<std::size_t>(p * (v.size() - 1));
        return v[idx];
    };

    const std::vector<double>& levels = ctx.lut->sigma_levels;
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(reps));
    volatile double sink = 0.0;
    for (int i = 0; i < reps; ++i) {
        const double sigma = levels[static_cast<std::size_t>(i) % levels.size()];
        const auto t0 = clock::now();
        const PlanResult r = select_trajectory(ctx, state, sigma);
        const auto t1 = clock::now();
        sink = sink + (r.chosen_id ? r.cost : 0.0);
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    report.selection_median_ms = percentile(times, 0.5);
    report.selection_p95_ms = percentile(times, 0.95);

    times.clear();
    const std::size_t K = ctx.lut->primitives.size();
    for (int i = 0; i < reps; ++i) {
        const double sigma = levels[static_cast<std::size_t>(i) % levels.size()] * 0.99;
        const auto t0 = clock::now();
        const std::size_t level = ceil_to_grid(sigma, levels);
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) acc += ctx.lut->margin(k, level);
        const auto t1 = clock::now();
        sink = sink + acc;
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    report.lookup_median_ms = percentile(times, 0.5);
    report.lookup_p95_ms = percentile(times, 0.95);
    (void)sink;
    return report;
}

}  // namespace amp
