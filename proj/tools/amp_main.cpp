// Command-line front end: offline LUT generation, simulated gust campaigns,
// single-shot planning queries, and runtime benchmarks.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "amp/config.hpp"
#include "amp/errors.hpp"
#include "amp/harness.hpp"
#include "amp/planner.hpp"
#include "amp/primitives.hpp"
#include "amp/tube_lut.hpp"
#include "amp/world.hpp"

namespace {

amp::Config load_or_default(const std::string& path) {
    if (path.empty()) return amp::Config{};
    return amp::load_config(path);
}

int run_lutgen(const std::string& config_path, const std::string& out_path, unsigned workers,
               std::int64_t seed_override, const std::string& primitives_csv) {
    amp::Config cfg = load_or_default(config_path);
    if (seed_override >= 0) cfg.lut_seed = seed_override;
    const amp::PrimitiveLibrary lib = amp::generate_library(cfg);
    if (!primitives_csv.empty()) amp::save_primitives_csv(lib, primitives_csv);
    const amp::MarginLUT lut = amp::build_lut(lib, amp::sigma_grid(cfg), cfg, workers);
    lut.save(out_path);
    std::cout << "wrote " << out_path << " (" << lut.primitives.size() << " primitives x "
              << lut.sigma_levels.size() << " levels, n_mc=" << lut.n_mc << ")\n";
    return 0;
}

int run_simulate(const std::string& spec_path, const std::string& config_path, int trials,
                 std::uint64_t seed, const std::string& out_dir, unsigned workers, bool plots) {
    const amp::Config cfg = load_or_default(config_path);
    const amp::ExperimentSpec spec = amp::ExperimentSpec::load(spec_path);
    const amp::ExperimentAssets assets = amp::ExperimentAssets::load(spec, cfg);
    amp::CampaignOptions opts;
    opts.trials = trials;
    opts.seed_override = seed;
    opts.workers = workers;
    opts.out_dir = out_dir;
    opts.plots = plots;
    const amp::CampaignResult result = amp::run_campaign(spec, assets, cfg, opts);
    std::cout << result.render_table();
    return 0;
}

int run_plan(const std::string& map_path, const std::string& lut_path, const std::string& ref_path,
             double sigma, double x, double y, double yaw, double t,
             const std::string& config_path) {
    const amp::Config cfg = load_or_default(config_path);
    const amp::MarginLUT lut = amp::MarginLUT::load(lut_path);
    const amp::PrimitiveLibrary lib = lut.rebuild_library();
    const amp::OccupancyGrid grid = amp::load_map(map_path);
    const amp::RefTrajectory ref = amp::RefTrajectory::load_csv(ref_path);

    amp::PlanningContext ctx;
    ctx.library = &lib;
    ctx.lut = &lut;
    ctx.grid = &grid;
    ctx.reference = &ref;
    ctx.replan_rate = cfg.replan_rate;
    ctx.check_period = cfg.check_period;
    ctx.above_grid_clamp = cfg.above_grid_clamp;

    amp::State state;
    state.position = {x, y, 0.0};
    state.yaw = yaw;
    state.time = t;

    const amp::PlanResult result = amp::select_trajectory(ctx, state, sigma);
    std::cout << "sigma_hat " << result.sigma_hat << " -> level " << result.sigma_level
              << (result.clamped ? " (clamped)" : "") << "\n";
    std::cout << "feasible " << result.feasible_count << "/" << lib.size() << "\n";
    if (result.chosen_id) {
        const auto& prim = lib.primitives[static_cast<std::size_t>(*result.chosen_id)];
        std::cout << "chosen id " << *result.chosen_id << " (v=" << prim.linear_speed
                  << " m/s, omega=" << prim.angular_speed << " rad/s)  cost " << result.cost
                  << " m  margin " << result.theta << " m\n";
    } else {
        std::cout << "chosen none (all tubes in collision)\n";
    }
    return 0;
}

int run_bench(const std::string& lut_path, const std::string& map_path, int reps,
              const std::string& config_path) {
    const amp::Config cfg = load_or_default(config_path);
    const amp::MarginLUT lut = amp::MarginLUT::load(lut_path);
    const amp::PrimitiveLibrary lib = lut.rebuild_library();
    const amp::OccupancyGrid grid = amp::load_map(map_path);
    const amp::RefTrajectory ref = amp::RefTrajectory::line(
        {grid.origin_x + 1.0, grid.origin_y + grid.height * grid.resolution * 0.5, 1.0}, 0.0, 1.0,
        grid.width * grid.resolution * 0.8);

    amp::PlanningContext ctx;
    ctx.library = &lib;
    ctx.lut = &lut;
    ctx.grid = &grid;
    ctx.reference = &ref;
    ctx.replan_rate = cfg.replan_rate;
    ctx.check_period = cfg.check_period;
    ctx.above_grid_clamp = true;

    amp::State state;
    state.position = {ref.points().front().x, ref.points().front().y, 1.0};
    state.yaw = 0.0;
    state.velocity = {1.0, 0.0, 0.0};

    const amp::BenchReport report = amp::bench(ctx, state, reps);
    std::cout << report.render();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive safety margins for motion primitive planning"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key=value config file (defaults when omitted)");

    // lutgen
    auto* lutgen = app.add_subcommand("lutgen", "build the margin lookup table offline");
    std::string lut_out = "lut.json";
    unsigned workers = 0;
    std::int64_t seed_override = -1;
    std::string primitives_csv;
    lutgen->add_option("--out", lut_out, "output LUT file")->required();
    lutgen->add_option("--workers", workers, "worker threads (0 = hardware)");
    lutgen->add_option("--seed", seed_override, "override lut.seed from the config");
    lutgen->add_option("--primitives-csv", primitives_csv, "also export the library as CSV");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a simulated gust campaign");
    std::string spec_path, out_dir;
    int trials = 0;
    std::uint64_t sim_seed = 0;
    bool plots = false;
    simulate->add_option("--spec", spec_path, "experiment spec JSON")->required();
    simulate->add_option("--trials", trials, "override trial count");
    simulate->add_option("--seed", sim_seed, "override campaign seed");
    simulate->add_option("--out", out_dir, "write trials.csv, summary.txt, traces here");
    simulate->add_option("--workers", workers, "worker threads (0 = hardware)");
    simulate->add_flag("--plots", plots, "emit SVG plots per trial");

    // plan
    auto* plan = app.add_subcommand("plan", "single-shot trajectory selection");
    std::string map_path, lut_path, ref_path;
    double sigma = 0.0, px = 0.0, py = 0.0, pyaw = 0.0, pt = 0.0;
    plan->add_option("--map", map_path, "map file (grid or obstacle list)")->required();
    plan->add_option("--lut", lut_path, "margin LUT file")->required();
    plan->add_option("--ref", ref_path, "reference trajectory CSV")->required();
    plan->add_option("--sigma", sigma, "estimated disturbance std [m/s^2]")->required();
    plan->add_option("--x", px, "vehicle x [m]");
    plan->add_option("--y", py, "vehicle y [m]");
    plan->add_option("--yaw", pyaw, "vehicle yaw [rad]");
    plan->add_option("--t", pt, "current time on the reference [s]");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "time selection and margin lookup");
    int reps = 1000;
    bench_cmd->add_option("--lut", lut_path, "margin LUT file")->required();
    bench_cmd->add_option("--map", map_path, "map file")->required();
    bench_cmd->add_option("--reps", reps, "repetitions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(lutgen))
            return run_lutgen(config_path, lut_out, workers, seed_override, primitives_csv);
        if (app.got_subcommand(simulate))
            return run_simulate(spec_path, config_path, trials, sim_seed, out_dir, workers, plots);
        if (app.got_subcommand(plan))
            return run_plan(map_path, lut_path, ref_path, sigma, px, py, pyaw, pt, config_path);
        if (app.got_subcommand(bench_cmd)) return run_bench(lut_path, map_path, reps, config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
