#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "amp/config.hpp"
#include "amp/errors.hpp"
#include "amp/tube_lut.hpp"

using namespace amp;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

MotionPrimitive straight_primitive(double v = 1.0, double t_f = 3.0) {
    const PrimitiveLibrary lib = generate_library({v}, {0.0}, t_f, 0.1);
    return lib.primitives[0];
}

/// Rollout set whose states sit exactly on the primitive plus a lateral
/// y-offset chosen per (rollout, sample).
RolloutSet synthetic_set(const MotionPrimitive& prim,
                         const std::vector<std::vector<std::pair<double, double>>>& t_and_offset) {
    RolloutSet set;
    set.primitive_id = prim.id;
    for (const auto& rollout : t_and_offset) {
        std::vector<State> states;
        for (const auto& [t, dy] : rollout) {
            const PrimitiveSample p = prim.pose_at(t);
            State s;
            s.position = {p.x, p.y + dy, p.z};
            s.time = t;
            states.push_back(s);
        }
        set.rollouts.push_back(std::move(states));
    }
    return set;
}

}  // namespace

TEST_CASE("two-sided normal quantile") {
    CHECK(two_sided_normal_quantile(0.05) == doctest::Approx(1.9599639845).epsilon(1e-9));
    CHECK(two_sided_normal_quantile(0.0455002639) == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(two_sided_normal_quantile(0.5) == doctest::Approx(0.6744897502).epsilon(1e-8));
    CHECK(two_sided_normal_quantile(0.002699796) == doctest::Approx(3.0).epsilon(1e-7));
    CHECK_THROWS_AS(two_sided_normal_quantile(0.0), ParamError);
    CHECK_THROWS_AS(two_sided_normal_quantile(1.0), ParamError);
}

TEST_CASE("rollouts with zero spread and zero disturbance collapse") {
    Config cfg;
    cfg.init_pos_std = 0.0;
    cfg.init_vel_std = 0.0;
    const MotionPrimitive prim = straight_primitive(0.5);
    const RolloutSet set = simulate_rollouts(prim, 0.0, 4, 99, cfg);
    REQUIRE(set.rollouts.size() == 4);
    for (std::size_t r = 1; r < set.rollouts.size(); ++r) {
        REQUIRE(set.rollouts[r].size() == set.rollouts[0].size());
        for (std::size_t i = 0; i < set.rollouts[r].size(); ++i) {
            const State& a = set.rollouts[r][i];
            const State& b = set.rollouts[0][i];
            CHECK(a.position.x == b.position.x);
            CHECK(a.position.y == b.position.y);
            CHECK(a.position.z == b.position.z);
            CHECK(a.velocity.x == b.velocity.x);
            CHECK(a.roll == b.roll);
            CHECK(a.pitch == b.pitch);
            CHECK(a.yaw == b.yaw);
        }
    }
    for (const State& s : set.rollouts[0])
        CHECK(cross_track_error(s, prim, true) < 0.01);
}

TEST_CASE("identical inputs give bit-identical rollout sets") {
    const Config cfg;
    const MotionPrimitive prim = straight_primitive();
    const RolloutSet a = simulate_rollouts(prim, 2.0, 8, 1234, cfg);
    const RolloutSet b = simulate_rollouts(prim, 2.0, 8, 1234, cfg);
    REQUIRE(a.rollouts.size() == b.rollouts.size());
    for (std::size_t r = 0; r < a.rollouts.size(); ++r)
        for (std::size_t i = 0; i < a.rollouts[r].size(); ++i)
            CHECK(std::memcmp(&a.rollouts[r][i], &b.rollouts[r][i], sizeof(State)) == 0);
}

TEST_CASE("cross-track spread grows with the disturbance level") {
    const Config cfg;
    const MotionPrimitive prim = straight_primitive(0.5);
    auto spread = [&](double sigma) {
        const RolloutSet set = simulate_rollouts(prim, sigma, 50, 777, cfg);
        double sum2 = 0.0;
        std::size_t n = 0;
        for (const auto& rollout : set.rollouts)
            for (const State& s : rollout) {
                const double e = cross_track_error(s, prim, true);
                sum2 += e * e;
                ++n;
            }
        return std::sqrt(sum2 / static_cast<double>(n));
    };
    CHECK(spread(5.0) > spread(1.0));
}

TEST_CASE("rollout parameter validation") {
    const Config cfg;
    const MotionPrimitive prim = straight_primitive();
    CHECK_THROWS_AS(simulate_rollouts(prim, 1.0, 1, 1, cfg), ParamError);
    CHECK_THROWS_AS(simulate_rollouts(prim, -1.0, 10, 1, cfg), ParamError);
}

TEST_CASE("states exactly on the primitive fit a zero margin") {
    const MotionPrimitive prim = straight_primitive();
    std::vector<std::vector<std::pair<double, double>>> data(3);
    for (int r = 0; r < 3; ++r)
        for (double t = 0.0; t <= 3.0; t += 0.1) data[static_cast<std::size_t>(r)].push_back({t, 0.0});
    const RolloutSet set = synthetic_set(prim, data);
    CHECK(fit_tube(set, prim, 0.05, 10, true) == doctest::Approx(0.0));
}

TEST_CASE("synthetic normal cross-track errors recover the quantile") {
    const MotionPrimitive prim = straight_primitive();
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n(0.0, 0.1);
    std::vector<std::vector<std::pair<double, double>>> data(100);
    for (auto& rollout : data)
        for (int i = 0; i < 1000; ++i) rollout.push_back({1.5, n(rng)});
    const RolloutSet set = synthetic_set(prim, data);
    const double theta = fit_tube(set, prim, 0.05, 1, true);
    CHECK(theta == doctest::Approx(0.196).epsilon(0.05));
}

TEST_CASE("margin is the max over per-bin intervals (z = 2 case)") {
    const MotionPrimitive prim = straight_primitive();
    // bin 0 (t < 1.5): rms 0.1; bin 1: rms 0.2
    std::vector<std::vector<std::pair<double, double>>> data(2);
    data[0] = {{0.5, 0.1}, {2.5, 0.2}};
    data[1] = {{0.5, -0.1}, {2.5, -0.2}};
    const RolloutSet set = synthetic_set(prim, data);
    const double theta = fit_tube(set, prim, 0.0455002639, 2, true);
    CHECK(theta == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("empty bins are reported by index") {
    const Config cfg;
    const MotionPrimitive prim = straight_primitive();
    const RolloutSet set = simulate_rollouts(prim, 0.5, 3, 5, cfg);
    CHECK_THROWS_AS(fit_tube(set, prim, 0.05, 500, true), FitError);
    try {
        fit_tube(set, prim, 0.05, 500, true);
    } catch (const FitError& e) {
        CHECK(std::string(e.what()).find("bin") != std::string::npos);
    }
}

TEST_CASE("small LUT build: monotone margins, coverage, determinism") {
    Config cfg;
    cfg.n_mc = 60;
    cfg.library_speeds = {1.0};
    cfg.omega_count = 3;
    const PrimitiveLibrary lib = generate_library(cfg);
    const std::vector<double> grid = {0.0, 1.0, 2.5};

    BuildStats stats;
    const MarginLUT lut = build_lut(lib, grid, cfg, 2, &stats);
    REQUIRE(lut.margins.size() == 3);
    REQUIRE(lut.margins[0].size() == 3);

    for (std::size_t k = 0; k < lut.margins.size(); ++k) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            CHECK(lut.margins[k][g] >= 0.0);
            CHECK(std::isfinite(lut.margins[k][g]));
            if (g > 0) CHECK(lut.margins[k][g] + 1e-3 >= lut.margins[k][g - 1]);
            CHECK(stats.coverage[k][g] >= 0.90);
        }
    }

    // worker count must not change a single byte
    const MarginLUT serial = build_lut(lib, grid, cfg, 1);
    const MarginLUT parallel = build_lut(lib, grid, cfg, 4);
    CHECK(serial.to_json_string() == parallel.to_json_string());
    CHECK(serial.to_json_string() == lut.to_json_string());
}

TEST_CASE("zero-disturbance collapsed build has near-zero straight margins") {
    Config cfg;
    cfg.n_mc = 10;
    cfg.init_pos_std = 0.0;
    cfg.init_vel_std = 0.0;
    cfg.library_speeds = {0.5};
    cfg.omega_count = 1;
    const PrimitiveLibrary lib = generate_library(cfg);
    const MarginLUT lut = build_lut(lib, {0.0}, cfg, 1);
    CHECK(lut.margins[0][0] < 0.01);
}

TEST_CASE("LUT file round-trips byte-identically") {
    Config cfg;
    cfg.n_mc = 10;
    cfg.library_speeds = {1.0};
    cfg.omega_count = 3;
    const PrimitiveLibrary lib = generate_library(cfg);
    const MarginLUT lut = build_lut(lib, {0.0, 2.0}, cfg, 1);

    const std::string p1 = std::string(AMP_TEST_TMP) + "/lut1.json";
    const std::string p2 = std::string(AMP_TEST_TMP) + "/lut2.json";
    lut.save(p1);
    const MarginLUT loaded = MarginLUT::load(p1);
    loaded.save(p2);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(loaded.epsilon == lut.epsilon);
    CHECK(loaded.margins == lut.margins);
    CHECK(loaded.config_hash == lut.config_hash);

    const PrimitiveLibrary rebuilt = loaded.rebuild_library();
    REQUIRE(rebuilt.size() == lib.size());
    for (std::size_t k = 0; k < lib.size(); ++k) {
        CHECK(rebuilt.primitives[k].id == lib.primitives[k].id);
        CHECK(rebuilt.primitives[k].angular_speed == lib.primitives[k].angular_speed);
        CHECK(rebuilt.primitives[k].samples.size() == lib.primitives[k].samples.size());
    }
}

TEST_CASE("LUT loader rejects malformed tables") {
    CHECK_THROWS_AS(MarginLUT::from_json_string("not json"), IoError);
    CHECK_THROWS_AS(MarginLUT::from_json_string("{}"), IoError);
    // descending sigma grid
    Config cfg;
    cfg.n_mc = 10;
    cfg.library_speeds = {1.0};
    cfg.omega_count = 1;
    const PrimitiveLibrary lib = generate_library(cfg);
    CHECK_THROWS_AS(build_lut(lib, {2.0, 1.0}, cfg, 1), ParamError);
    CHECK_THROWS_AS(build_lut(lib, {}, cfg, 1), ParamError);
}
