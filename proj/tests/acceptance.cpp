// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fail. The full-size margin table (22 primitives x 9
// levels x 1000 rollouts) is built once up front and reused.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "amp/config.hpp"
#include "amp/disturbance.hpp"
#include "amp/harness.hpp"
#include "amp/planner.hpp"
#include "amp/primitives.hpp"
#include "amp/rng.hpp"
#include "amp/tube_lut.hpp"
#include "amp/world.hpp"

using namespace amp;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : ": ",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_path(const std::string& name) { return std::string(AMP_TEST_TMP) + "/" + name; }
std::string data_path(const std::string& name) { return std::string(AMP_DATA_DIR) + "/" + name; }

char fmt_buf[512];

// --- criterion 1: gust-study trend reproduction ----------------------------

void criterion_1(const ExperimentAssets& assets, const Config& cfg) {
    ExperimentSpec spec = ExperimentSpec::load(data_path("table1.json"));
    CampaignOptions opts;
    opts.workers = 0;
    const CampaignResult result = run_campaign(spec, assets, cfg, opts);

    std::string detail;
    bool ok = true;

    for (const auto level : {DrydenLevel::kLow, DrydenLevel::kMed, DrydenLevel::kHigh}) {
        const double s = result.cell(level, MarginMode::kAdaptive).success_rate();
        if (s < 100.0) {
            ok = false;
            detail += std::string(" adaptive success ") + dryden_level_name(level) + " = " +
                      std::to_string(s) + "%;";
        }
        const double sh = result.cell(level, MarginMode::kStaticHigh).success_rate();
        if (sh < 100.0) {
            ok = false;
            detail += std::string(" static_high success ") + dryden_level_name(level) + " = " +
                      std::to_string(sh) + "%;";
        }
    }

    const double low_fail = result.cell(DrydenLevel::kHigh, MarginMode::kStaticLow).success_rate();
    if (low_fail >= 100.0) {
        ok = false;
        detail += " static_low never failed at high turbulence;";
    }

    for (const auto level : {DrydenLevel::kMed, DrydenLevel::kHigh}) {
        const double d_low = result.cell(level, MarginMode::kStaticLow).mean_distance();
        const double d_adp = result.cell(level, MarginMode::kAdaptive).mean_distance();
        const double d_high = result.cell(level, MarginMode::kStaticHigh).mean_distance();
        if (!(d_low < d_adp && d_adp < d_high)) {
            ok = false;
            std::snprintf(fmt_buf, sizeof(fmt_buf),
                          " distance ordering broken at %s (low %.3f, adaptive %.3f, high %.3f);",
                          dryden_level_name(level), d_low, d_adp, d_high);
            detail += fmt_buf;
        }
    }

    double worst_margin = 100.0;
    for (const auto level : {DrydenLevel::kLow, DrydenLevel::kMed, DrydenLevel::kHigh})
        worst_margin =
            std::min(worst_margin, result.cell(level, MarginMode::kAdaptive).mean_within_margin());
    if (worst_margin < 99.0) {
        ok = false;
        std::snprintf(fmt_buf, sizeof(fmt_buf), " adaptive within-margin %.2f%% < 99%%;",
                      worst_margin);
        detail += fmt_buf;
    }

    if (ok) {
        std::snprintf(fmt_buf, sizeof(fmt_buf),
                      "adaptive 100%% at all levels, static_low %.0f%% at high, "
                      "orderings hold, within-margin >= %.2f%%",
                      low_fail, worst_margin);
        detail = fmt_buf;
    }
    report("C1 gust-study trends", ok, detail);
}

// --- criterion 2: tube-fit quantile oracle ---------------------------------

void criterion_2() {
    const PrimitiveLibrary lib = generate_library({1.0}, {0.0}, 3.0, 0.1);
    const MotionPrimitive& prim = lib.primitives[0];
    RolloutSet set;
    set.primitive_id = prim.id;
    GaussianSampler rng(20260809);
    set.rollouts.resize(1000);
    for (auto& rollout : set.rollouts) {
        rollout.reserve(1000);
        for (int i = 0; i < 1000; ++i) {
            const double t = 1.5;
            const PrimitiveSample p = prim.pose_at(t);
            State s;
            s.position = {p.x, p.y + 0.1 * rng.next(), p.z};
            s.time = t;
            rollout.push_back(s);
        }
    }
    const double theta = fit_tube(set, prim, 0.05, 1, true);
    const bool ok = std::abs(theta - 0.196) <= 0.005;
    std::snprintf(fmt_buf, sizeof(fmt_buf), "fit_tube on 1e6 N(0, 0.1) samples -> %.4f m (want 0.196 +- 0.005)",
                  theta);
    report("C2 tube-fit oracle", ok, fmt_buf);
}

// --- criterion 3: LUT monotonicity and coverage ----------------------------

void criterion_3(const PrimitiveLibrary& lib, const MarginLUT& lut, const BuildStats& stats) {
    bool ok = true;
    std::string detail;

    const std::size_t K = lut.primitives.size();
    const std::size_t G = lut.sigma_levels.size();
    for (std::size_t k = 0; k < K && ok; ++k)
        for (std::size_t g = 1; g < G; ++g)
            if (lut.margins[k][g] + 1e-3 < lut.margins[k][g - 1]) {
                ok = false;
                std::snprintf(fmt_buf, sizeof(fmt_buf),
                              " sigma-monotonicity broken at primitive %zu level %zu (%.4f -> %.4f)",
                              k, g, lut.margins[k][g - 1], lut.margins[k][g]);
                detail += fmt_buf;
            }

    for (std::size_t g = 0; g < G; ++g) {
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = 0; b < K; ++b) {
                if (lib.primitives[a].linear_speed != lib.primitives[b].linear_speed) continue;
                const double wa = std::abs(lib.primitives[a].angular_speed);
                const double wb = std::abs(lib.primitives[b].angular_speed);
                if (wa < wb && lut.margins[a][g] > lut.margins[b][g] + 1e-2) {
                    ok = false;
                    std::snprintf(
                        fmt_buf, sizeof(fmt_buf),
                        " omega-monotonicity broken at level %zu: |w|=%.3f -> %.4f vs |w|=%.3f -> %.4f;",
                        g, wa, lut.margins[a][g], wb, lut.margins[b][g]);
                    detail += fmt_buf;
                    if (detail.size() > 300) break;
                }
            }
        if (detail.size() > 300) break;
    }

    double worst_cov = 1.0;
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t g = 0; g < G; ++g) worst_cov = std::min(worst_cov, stats.coverage[k][g]);
    if (worst_cov < 0.94) {
        ok = false;
        std::snprintf(fmt_buf, sizeof(fmt_buf), " worst cell coverage %.3f < 0.94;", worst_cov);
        detail += fmt_buf;
    }

    if (ok) {
        std::snprintf(fmt_buf, sizeof(fmt_buf),
                      "margins monotone in sigma (1 mm) and |omega| (1 cm), worst coverage %.3f",
                      worst_cov);
        detail = fmt_buf;
    }
    report("C3 LUT monotonicity and coverage", ok, detail);
}

// --- criterion 4: selection equals brute force -----------------------------

std::optional<int> brute_force_choice(const PlanningContext& ctx, const State& s,
                                      std::size_t level) {
    const Pose anchor{s.position, s.yaw};
    const double t0 = std::clamp(s.time, ctx.reference->t_start(), ctx.reference->t_end());
    std::optional<int> best;
    double best_cost = 0.0, best_omega = 0.0;
    for (std::size_t k = 0; k < ctx.library->primitives.size(); ++k) {
        const MotionPrimitive& prim = ctx.library->primitives[k];
        const double theta = ctx.lut->margin(k, level);
        if (!tube_is_free(*ctx.grid, prim, anchor, theta, ctx.check_period)) continue;
        const double cost = j_sim(prim, anchor, *ctx.reference, t0);
        const double omega = std::abs(prim.angular_speed);
        if (!best || cost < best_cost ||
            (cost == best_cost && (omega < best_omega || (omega == best_omega && prim.id < *best)))) {
            best = prim.id;
            best_cost = cost;
            best_omega = omega;
        }
    }
    return best;
}

void criterion_4(const PrimitiveLibrary& lib, const MarginLUT& lut) {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int mismatches = 0, infeasible = 0;
    const int scenes = 100;
    for (int scene = 0; scene < scenes; ++scene) {
        OccupancyGrid map = make_empty_grid(0.1, -6.0, -6.0, 120, 120);
        std::uniform_int_distribution<int> cell(0, 119);
        const int blobs = 2 + static_cast<int>(u01(rng) * 7);
        for (int b = 0; b < blobs; ++b) {
            const int ci = cell(rng), cj = cell(rng);
            const int r = 2 + static_cast<int>(u01(rng) * 10);
            for (int j = std::max(0, cj - r); j <= std::min(119, cj + r); ++j)
                for (int i = std::max(0, ci - r); i <= std::min(119, ci + r); ++i)
                    if ((i - ci) * (i - ci) + (j - cj) * (j - cj) <= r * r) map.set(i, j, true);
        }
        const RefTrajectory ref =
            RefTrajectory::line({-3.0, (u01(rng) - 0.5) * 4.0, 0.0}, (u01(rng) - 0.5), 1.0, 10.0);

        PlanningContext ctx;
        ctx.library = &lib;
        ctx.lut = &lut;
        ctx.grid = &map;
        ctx.reference = &ref;

        State s;
        s.position = {(u01(rng) - 0.5) * 8.0, (u01(rng) - 0.5) * 8.0, 0.0};
        s.yaw = (u01(rng) - 0.5) * 2.0 * kPi;
        s.time = u01(rng) * 5.0;
        const double sigma = u01(rng) * 5.0;

        const PlanResult got = select_trajectory(ctx, s, sigma);
        const std::optional<int> want =
            brute_force_choice(ctx, s, ceil_to_grid(sigma, lut.sigma_levels));
        if (got.chosen_id != want) ++mismatches;
        if (!want) ++infeasible;
    }
    const bool ok = mismatches == 0 && infeasible > 0;
    std::snprintf(fmt_buf, sizeof(fmt_buf), "%d scenes, %d mismatches, %d infeasible cases covered",
                  scenes, mismatches, infeasible);
    report("C4 selection equals brute force", ok, fmt_buf);
}

// --- criterion 5: estimator fidelity ---------------------------------------

void criterion_5(const Config& cfg) {
    bool ok = true;
    std::string detail;

    // (a) moving variance == batch recomputation on every update
    {
        DisturbanceEstimator est(1.5);
        std::mt19937_64 rng(99);
        std::normal_distribution<double> n(0.0, 1.0);
        std::uniform_real_distribution<double> dts(0.01, 0.25);
        std::vector<std::pair<double, std::pair<double, double>>> all;
        double t = 0.0;
        double worst_rel = 0.0;
        for (int i = 0; i < 20000; ++i) {
            t += dts(rng);
            const double gx = 2.0 * n(rng), gy = 0.7 * n(rng);
            est.add(t, gx, gy);
            all.push_back({t, {gx, gy}});
            double bx = 0.0;
            std::size_t count = 0;
            for (auto it = all.rbegin(); it != all.rend() && it->first >= t - 1.5; ++it) {
                bx += it->second.first * it->second.first;
                ++count;
            }
            const double batch = std::sqrt(bx / static_cast<double>(count));
            if (batch > 0)
                worst_rel = std::max(worst_rel, std::abs(est.sigma_x() - batch) / batch);
        }
        if (worst_rel > 1e-9) {
            ok = false;
            std::snprintf(fmt_buf, sizeof(fmt_buf), " batch mismatch rel %.2e;", worst_rel);
            detail += fmt_buf;
        } else {
            std::snprintf(fmt_buf, sizeof(fmt_buf), "batch-equality rel err %.1e", worst_rel);
            detail += fmt_buf;
        }
    }

    // (b) closed-loop residual recovery of the injected window sigma
    {
        const WindSeries wind = gaussian_wind(2.0, 4242, 40.0, 0.1);
        DisturbanceEstimator est(cfg.estimator_window);
        State s;
        s.position = {0, 0, 1};
        const Setpoint hold{{0, 0, 1}, {}, 0.0, 0.0};
        PidController pid(cfg);
        Control u = pid.update(s, hold, cfg.control_period);
        State prev = s;
        Control prev_u = u;
        const int steps_per_ctrl = static_cast<int>(std::round(cfg.control_period / cfg.sim_dt));
        const int n_steps = static_cast<int>(std::round(30.0 / cfg.sim_dt));
        for (int i = 1; i <= n_steps; ++i) {
            const double t = i * cfg.sim_dt;
            s = step(s, u, {wind.at(t), Frame::kWorld}, cfg.sim_dt, cfg);
            if (i % steps_per_ctrl == 0) {
                const DisturbanceSample res = residual(s, prev, prev_u, cfg.control_period, cfg);
                est.add(t, res.acceleration.x, res.acceleration.y);
                u = pid.update(s, hold, cfg.control_period);
                prev = s;
                prev_u = u;
            }
        }
        // window standard deviation of the injected series over the same span
        double sum2 = 0.0;
        int count = 0;
        const double t_end = 30.0;
        for (std::size_t k = 0; k < wind.size(); ++k) {
            const double tk = static_cast<double>(k) * wind.sample_period;
            if (tk >= t_end - cfg.estimator_window && tk <= t_end) {
                sum2 += wind.ax[k] * wind.ax[k];
                ++count;
            }
        }
        const double injected = std::sqrt(sum2 / count);
        const double recovered = est.sigma_x();
        const double rel = std::abs(recovered - injected) / injected;
        if (rel > 0.20) {
            ok = false;
            std::snprintf(fmt_buf, sizeof(fmt_buf),
                          " closed-loop recovery off by %.0f%% (est %.3f vs injected %.3f);",
                          rel * 100.0, recovered, injected);
            detail += fmt_buf;
        } else {
            std::snprintf(fmt_buf, sizeof(fmt_buf), ", recovery within %.0f%% (est %.3f vs %.3f)",
                          rel * 100.0, recovered, injected);
            detail += fmt_buf;
        }
    }
    report("C5 estimator fidelity", ok, detail);
}

// --- criterion 6: runtime bounds --------------------------------------------

void criterion_6(const ExperimentAssets& assets, const Config& cfg) {
    PlanningContext ctx;
    ctx.library = &assets.library;
    ctx.lut = &assets.lut;
    ctx.grid = &assets.grid;
    ctx.reference = &assets.reference;
    ctx.check_period = cfg.check_period;
    ctx.above_grid_clamp = true;

    State s;
    s.position = {0, 0, 1};
    s.velocity = {1, 0, 0};

    const BenchReport report_data = bench(ctx, s, 1000);
    const bool ok = report_data.lookup_median_ms < 0.1 && report_data.selection_median_ms < 50.0;
    std::snprintf(fmt_buf, sizeof(fmt_buf),
                  "lookup median %.4f ms (< 0.1), selection median %.2f ms (< 50)",
                  report_data.lookup_median_ms, report_data.selection_median_ms);
    report("C6 runtime bounds", ok, fmt_buf);
}

// --- criterion 7: worker-count determinism ----------------------------------

void criterion_7(const Config& base_cfg) {
    bool ok = true;
    std::string detail;

    Config cfg = base_cfg;
    cfg.n_mc = 50;
    cfg.library_speeds = {1.0};
    cfg.omega_count = 5;
    cfg.sigma_count = 3;
    const PrimitiveLibrary lib = generate_library(cfg);
    const MarginLUT serial = build_lut(lib, sigma_grid(cfg), cfg, 1);
    const MarginLUT parallel = build_lut(lib, sigma_grid(cfg), cfg, 4);
    if (serial.to_json_string() != parallel.to_json_string()) {
        ok = false;
        detail += " lutgen differs across worker counts;";
    }

    ExperimentSpec spec;
    spec.wind_kind = WindKind::kDryden;
    spec.levels = {DrydenLevel::kMed};
    spec.modes = {MarginMode::kAdaptive, MarginMode::kStaticLow};
    spec.estimator_mode = EstimatorMode::kOracle;
    spec.goal_x = 8.0;
    spec.trials = 2;
    spec.base_seed = 5;
    spec.time_limit_factor = 3.0;
    spec.line_speed = 1.0;

    ExperimentAssets assets;
    assets.lut = serial;
    assets.library = assets.lut.rebuild_library();
    assets.grid = make_empty_grid(0.1, -2.0, -8.0, 160, 160);
    assets.reference = RefTrajectory::line({0, 0, 1}, 0.0, 1.0, 10.0);

    const std::string dir1 = tmp_path("det1");
    const std::string dir2 = tmp_path("det2");
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    CampaignOptions o1;
    o1.workers = 1;
    o1.out_dir = dir1;
    CampaignOptions o2;
    o2.workers = 4;
    o2.out_dir = dir2;
    run_campaign(spec, assets, cfg, o1);
    run_campaign(spec, assets, cfg, o2);
    if (slurp(dir1 + "/trials.csv") != slurp(dir2 + "/trials.csv") ||
        slurp(dir1 + "/trace_med_adaptive_0.csv") != slurp(dir2 + "/trace_med_adaptive_0.csv") ||
        slurp(dir1 + "/trace_med_static_low_1.csv") != slurp(dir2 + "/trace_med_static_low_1.csv")) {
        ok = false;
        detail += " simulate outputs differ across worker counts;";
    }

    if (ok) detail = "lutgen and simulate byte-identical for 1 vs 4 workers";
    report("C7 worker-count determinism", ok, detail);
}

// --- criterion 8: file round-trips -------------------------------------------

void criterion_8(const MarginLUT& lut) {
    bool ok = true;
    std::string detail;

    const std::string l1 = tmp_path("rt_lut1.json");
    const std::string l2 = tmp_path("rt_lut2.json");
    lut.save(l1);
    MarginLUT::load(l1).save(l2);
    if (slurp(l1) != slurp(l2)) {
        ok = false;
        detail += " LUT file changed across write-read-write;";
    }

    const ObstacleMap omap = load_obstacles(data_path("gustmap.obs"));
    const std::string o1 = tmp_path("rt_obs1.map");
    const std::string o2 = tmp_path("rt_obs2.map");
    save_obstacles(omap, o1);
    save_obstacles(load_obstacles(o1), o2);
    if (slurp(o1) != slurp(o2)) {
        ok = false;
        detail += " obstacle file changed across write-read-write;";
    }

    const OccupancyGrid grid = rasterize(omap);
    const std::string g1 = tmp_path("rt_grid1.map");
    const std::string g2 = tmp_path("rt_grid2.map");
    save_grid(grid, g1);
    save_grid(load_grid(g1), g2);
    if (slurp(g1) != slurp(g2)) {
        ok = false;
        detail += " grid file changed across write-read-write;";
    }

    if (ok) detail = "LUT, obstacle, and grid files byte-stable";
    report("C8 file round-trips", ok, detail);
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    const Config cfg;

    std::printf("building %d-primitive x %d-level margin table (n_mc = %d)...\n",
                static_cast<int>(cfg.library_speeds.size() * cfg.omega_count),
                static_cast<int>(cfg.sigma_count), static_cast<int>(cfg.n_mc));
    const auto t0 = clock::now();
    const PrimitiveLibrary lib = generate_library(cfg);
    BuildStats stats;
    const MarginLUT lut = build_lut(lib, sigma_grid(cfg), cfg, 0, &stats);
    const double build_s = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("build took %.1f s\n", build_s);

    const std::string lut_path = tmp_path("acceptance_lut.json");
    lut.save(lut_path);

    ExperimentAssets assets;
    assets.lut = lut;
    assets.library = assets.lut.rebuild_library();
    assets.grid = load_map(data_path("gustmap.obs"));
    {
        const ExperimentSpec spec = ExperimentSpec::load(data_path("table1.json"));
        assets.reference = RefTrajectory::line(spec.line_start, spec.line_yaw, spec.line_speed,
                                               spec.line_length, cfg.sample_period);
    }

    criterion_1(assets, cfg);
    criterion_2();
    criterion_3(lib, lut, stats);
    criterion_4(lib, lut);
    criterion_5(cfg);
    criterion_6(assets, cfg);
    criterion_7(cfg);
    criterion_8(lut);

    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all acceptance criteria passed\n");
    return failures == 0 ? 0 : 1;
}
