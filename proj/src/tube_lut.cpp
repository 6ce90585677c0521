#include "amp/tube_lut.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "amp/errors.hpp"
#include "amp/parallel.hpp"
#include "amp/rng.hpp"

namespace amp {

double two_sided_normal_quantile(double epsilon) {
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw ParamError("two_sided_normal_quantile: epsilon must be in (0,1)");
    // Wichura's AS 241 (PPND16) evaluated at p = 1 - epsilon/2.
    const double p = 1.0 - 0.5 * epsilon;
    const double q = p - 0.5;
    double r, val;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        val = q *
              (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                    67265.770927008700853) * r + 45921.953931549871457) * r +
                  13731.693765509461125) * r + 1971.5909503065514427) * r +
                133.14166789178437745) * r + 3.387132872796366608) /
              (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
                    39307.89580009271061) * r + 21213.794301586595867) * r +
                  5394.1960214247511077) * r + 687.1870074920579083) * r +
                42.313330701600911252) * r + 1.0);
        return val;
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                    0.24178072517745061177) * r + 1.27045825245236838258) * r +
                  3.64784832476320460504) * r + 5.7694972214606914055) * r +
                4.6303378461565452959) * r + 1.42343711074968357734) /
              (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                    0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                  0.68976733498510000455) * r + 1.6763848301838038494) * r +
                2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                  0.29656057182850489123) * r + 1.7848265399172913358) * r +
                5.4637849111641143699) * r + 6.6579046435011037772) /
              (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                    1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                  0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                0.59983220655588793769) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

RolloutSet simulate_rollouts(const MotionPrimitive& prim, double sigma_g, int n_mc,
                             std::uint64_t seed, const Config& cfg) {
    if (n_mc < 2) throw ParamError("simulate_rollouts: n_mc must be >= 2");
    if (sigma_g < 0) throw ParamError("simulate_rollouts: sigma_g must be >= 0");

    const int steps_per_control = static_cast<int>(std::round(cfg.control_period / cfg.sim_dt));
    const int steps_per_redraw = static_cast<int>(std::round(cfg.disturbance_period / cfg.sim_dt));
    const int steps_per_record = static_cast<int>(std::round(cfg.record_period / cfg.sim_dt));
    const int n_steps = static_cast<int>(std::round(prim.t_f / cfg.sim_dt));
    const Pose anchor;  // rollouts live in the primitive's own frame

    RolloutSet set;
    set.primitive_id = prim.id;
    set.sigma_g = sigma_g;
    set.seed_base = seed;
    set.rollouts.resize(static_cast<std::size_t>(n_mc));

    for (int r = 0; r < n_mc; ++r) {
        GaussianSampler rng(derive_seed(seed, static_cast<std::uint64_t>(prim.id),
                                        static_cast<std::uint64_t>(r)));
        State state;
        state.position = {cfg.init_pos_std * rng.next(), cfg.init_pos_std * rng.next(),
                          cfg.init_pos_std * rng.next()};
        const Vec3 v0 = prim.velocity_at(0.0);
        state.velocity = {v0.x + cfg.init_vel_std * rng.next(), v0.y + cfg.init_vel_std * rng.next(),
                          v0.z + cfg.init_vel_std * rng.next()};

        PidController pid(cfg);
        Control control = hover_control(cfg);
        DisturbanceSample gust{{0.0, 0.0, 0.0}, Frame::kWorld};

        auto& trace = set.rollouts[static_cast<std::size_t>(r)];
        trace.reserve(static_cast<std::size_t>(n_steps / steps_per_record) + 1);
        for (int i = 0; i <= n_steps; ++i) {
            const double t = i * cfg.sim_dt;
            if (i % steps_per_redraw == 0)
                gust.acceleration = {sigma_g * rng.next(), sigma_g * rng.next(), 0.0};
            if (i % steps_per_control == 0)
                control = pid.update(state, prim.setpoint_at(anchor, t), cfg.control_period);
            if (i % steps_per_record == 0 || i == n_steps) trace.push_back(state);
            if (i == n_steps) break;
            state = step(state, control, gust, cfg.sim_dt, cfg);
        }
    }
    return set;
}

double cross_track_error(const State& s, const MotionPrimitive& prim, bool include_z) {
    const PrimitiveSample ref = prim.pose_at(s.time);
    const double cy = std::cos(ref.psi), sy = std::sin(ref.psi);
    Vec3 e = {s.position.x - ref.x, s.position.y - ref.y, s.position.z - ref.z};
    const double along = e.x * cy + e.y * sy;  // tangent is horizontal for planar primitives
    e.x -= along * cy;
    e.y -= along * sy;
    if (!include_z) e.z = 0.0;
    return e.norm();
}

double fit_tube(const RolloutSet& rollouts, const MotionPrimitive& prim, double epsilon,
                int n_segments, bool include_z) {
    if (epsilon <= 0.0 || epsilon >= 1.0) throw ParamError("fit_tube: epsilon must be in (0,1)");
    if (n_segments < 1) throw ParamError("fit_tube: n_segments must be >= 1");
    if (rollouts.rollouts.size() < 2) throw ParamError("fit_tube: need at least 2 rollouts");

    std::vector<double> sum_sq(static_cast<std::size_t>(n_segments), 0.0);
    std::vector<std::size_t> count(static_cast<std::size_t>(n_segments), 0);
    for (const auto& trace : rollouts.rollouts) {
        for (const State& s : trace) {
            int bin = static_cast<int>(std::floor(s.time / prim.t_f * n_segments));
            bin = std::clamp(bin, 0, n_segments - 1);
            const double err = cross_track_error(s, prim, include_z);
            sum_sq[static_cast<std::size_t>(bin)] += err * err;
            ++count[static_cast<std::size_t>(bin)];
        }
    }

    const double z = two_sided_normal_quantile(epsilon);
    double theta = 0.0;
    for (int b = 0; b < n_segments; ++b) {
        if (count[static_cast<std::size_t>(b)] == 0)
            throw FitError("fit_tube: empty time bin " + std::to_string(b) + " of " +
                           std::to_string(n_segments));
        const double sigma_hat =
            std::sqrt(sum_sq[static_cast<std::size_t>(b)] /
                      static_cast<double>(count[static_cast<std::size_t>(b)]));
        theta = std::max(theta, z * sigma_hat);
    }
    return theta;
}

PrimitiveLibrary MarginLUT::rebuild_library() const {
    PrimitiveLibrary lib;
    for (const auto& info : primitives) {
        MotionPrimitive prim;
        prim.id = info.id;
        prim.linear_speed = info.linear_speed;
        prim.angular_speed = info.angular_speed;
        prim.t_f = info.t_f;
        prim.sample_period = sample_period;
        const int n = static_cast<int>(std::round(info.t_f / sample_period));
        for (int i = 0; i <= n; ++i)
            prim.samples.push_back(prim.pose_at(i == n ? info.t_f : i * sample_period));
        lib.primitives.push_back(std::move(prim));
    }
    return lib;
}

std::string MarginLUT::to_json_string() const {
    nlohmann::json j;
    j["format_version"] = format_version;
    j["epsilon"] = epsilon;
    j["n_mc"] = n_mc;
    j["sample_period"] = sample_period;
    j["sigma_grid"] = sigma_levels;
    nlohmann::json prims = nlohmann::json::array();
    for (const auto& p : primitives) {
        nlohmann::json e;
        e["id"] = p.id;
        e["linear_speed"] = p.linear_speed;
        e["angular_speed"] = p.angular_speed;
        e["t_f"] = p.t_f;
        prims.push_back(e);
    }
    j["primitives"] = prims;
    j["margins"] = margins;
    j["config_hash"] = config_hash;
    return j.dump(2) + "\n";
}

MarginLUT MarginLUT::from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("lut: malformed JSON: ") + e.what());
    }
    MarginLUT lut;
    try {
        lut.format_version = j.at("format_version").get<int>();
        if (lut.format_version != 1)
            throw IoError("lut: unsupported format_version " + std::to_string(lut.format_version));
        lut.epsilon = j.at("epsilon").get<double>();
        lut.n_mc = j.at("n_mc").get<int>();
        lut.sample_period = j.at("sample_period").get<double>();
        lut.sigma_levels = j.at("sigma_grid").get<std::vector<double>>();
        for (const auto& e : j.at("primitives"))
            lut.primitives.push_back({e.at("id").get<int>(), e.at("linear_speed").get<double>(),
                                      e.at("angular_speed").get<double>(), e.at("t_f").get<double>()});
        lut.margins = j.at("margins").get<std::vector<std::vector<double>>>();
        lut.config_hash = j.at("config_hash").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("lut: missing or mistyped field: ") + e.what());
    }
    if (lut.margins.size() != lut.primitives.size())
        throw IoError("lut: margins row count does not match primitive count");
    for (std::size_t k = 0; k < lut.margins.size(); ++k) {
        if (lut.margins[k].size() != lut.sigma_levels.size())
            throw IoError("lut: margins column count does not match sigma grid");
        for (double m : lut.margins[k])
            if (!(m >= 0.0) || !std::isfinite(m)) throw IoError("lut: margins must be finite and >= 0");
    }
    for (std::size_t g = 1; g < lut.sigma_levels.size(); ++g)
        if (lut.sigma_levels[g] <= lut.sigma_levels[g - 1])
            throw IoError("lut: sigma grid must be strictly ascending");
    return lut;
}

void MarginLUT::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("lut: cannot write " + path);
    out << to_json_string();
}

MarginLUT MarginLUT::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("lut: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

MarginLUT build_lut(const PrimitiveLibrary& lib, const std::vector<double>& sigma_levels,
                    const Config& cfg, unsigned workers, BuildStats* stats) {
    if (sigma_levels.empty()) throw ParamError("build_lut: sigma grid must be nonempty");
    for (std::size_t g = 1; g < sigma_levels.size(); ++g)
        if (sigma_levels[g] <= sigma_levels[g - 1])
            throw ParamError("build_lut: sigma grid must be strictly ascending");
    if (lib.primitives.empty()) throw ParamError("build_lut: library must be nonempty");

    const std::size_t K = lib.primitives.size();
    const std::size_t G = sigma_levels.size();

    MarginLUT lut;
    lut.epsilon = cfg.epsilon;
    lut.n_mc = static_cast<int>(cfg.n_mc);
    lut.sample_period = cfg.sample_period;
    lut.sigma_levels = sigma_levels;
    lut.config_hash = config_hash(cfg);
    for (const auto& prim : lib.primitives)
        lut.primitives.push_back({prim.id, prim.linear_speed, prim.angular_speed, prim.t_f});
    lut.margins.assign(K, std::vector<double>(G, 0.0));
    if (stats) stats->coverage.assign(K, std::vector<double>(G, 0.0));

    const std::uint64_t base = static_cast<std::uint64_t>(cfg.lut_seed);
    parallel_for(K * G, workers, [&](std::size_t cell) {
        const std::size_t k = cell / G;
        const std::size_t g = cell % G;
        const MotionPrimitive& prim = lib.primitives[k];
        try {
            const RolloutSet rollouts = simulate_rollouts(
                prim, sigma_levels[g], static_cast<int>(cfg.n_mc), derive_seed(base, g), cfg);
            const double theta = fit_tube(rollouts, prim, cfg.epsilon,
                                          static_cast<int>(cfg.n_segments),
                                          cfg.cross_track_include_z);
            lut.margins[k][g] = theta;
            if (stats) {
                std::size_t inside = 0, total = 0;
                for (const auto& trace : rollouts.rollouts)
                    for (const State& s : trace) {
                        if (cross_track_error(s, prim, cfg.cross_track_include_z) <= theta)
                            ++inside;
                        ++total;
                    }
                stats->coverage[k][g] =
                    total ? static_cast<double>(inside) / static_cast<double>(total) : 0.0;
            }
        } catch (const Error& e) {
            throw Error("build_lut: cell (primitive " + std::to_string(prim.id) + ", sigma " +
                        std::to_string(sigma_levels[g]) + "): " + e.what());
        }
    });
    return lut;
}

}  // namespace amp
