#include "amp/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "amp/errors.hpp"
#include "amp/util.hpp"

namespace amp {

const std::vector<ConfigField>& config_fields() {
    static const std::vector<ConfigField> fields = {
        {"vehicle.mass", &Config::mass},
        {"vehicle.gravity", &Config::gravity},
        {"vehicle.hover_thrust", &Config::hover_thrust},
        {"vehicle.tau_attitude", &Config::tau_attitude},
        {"vehicle.tilt_limit", &Config::tilt_limit},
        {"vehicle.yaw_rate_limit", &Config::yaw_rate_limit},
        {"pid.kp_pos", &Config::kp_pos},
        {"pid.kp_vel", &Config::kp_vel},
        {"pid.ki_vel", &Config::ki_vel},
        {"pid.kd_vel", &Config::kd_vel},
        {"pid.kp_yaw", &Config::kp_yaw},
        {"pid.vel_cmd_limit", &Config::vel_cmd_limit},
        {"pid.int_limit", &Config::int_limit},
        {"sim.dt", &Config::sim_dt},
        {"sim.control_period", &Config::control_period},
        {"library.speeds", &Config::library_speeds},
        {"library.omega_count", &Config::omega_count},
        {"library.omega_max", &Config::omega_max},
        {"library.t_f", &Config::t_f},
        {"library.sample_period", &Config::sample_period},
        {"lut.sigma_min", &Config::sigma_min},
        {"lut.sigma_max", &Config::sigma_max},
        {"lut.sigma_count", &Config::sigma_count},
        {"lut.epsilon", &Config::epsilon},
        {"lut.n_mc", &Config::n_mc},
        {"lut.n_segments", &Config::n_segments},
        {"lut.seed", &Config::lut_seed},
        {"lut.disturbance_period", &Config::disturbance_period},
        {"lut.init_pos_std", &Config::init_pos_std},
        {"lut.init_vel_std", &Config::init_vel_std},
        {"lut.record_period", &Config::record_period},
        {"lut.cross_track_include_z", &Config::cross_track_include_z},
        {"estimator.window", &Config::estimator_window},
        {"dryden.tau", &Config::dryden_tau},
        {"dryden.sigma_low", &Config::dryden_sigma_low},
        {"dryden.sigma_med", &Config::dryden_sigma_med},
        {"dryden.sigma_high", &Config::dryden_sigma_high},
        {"dryden.sample_period", &Config::dryden_sample_period},
        {"planner.replan_rate", &Config::replan_rate},
        {"planner.check_period", &Config::check_period},
        {"planner.above_grid_clamp", &Config::above_grid_clamp},
    };
    return fields;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value '" + s + "' for key " + key);
    }
}

struct Assign {
    Config& cfg;
    const std::string& key;
    const std::string& value;

    void operator()(double Config::* m) const { cfg.*m = parse_double(value, key); }
    void operator()(std::int64_t Config::* m) const {
        const double v = parse_double(value, key);
        if (std::floor(v) != v) throw ConfigError("config: key " + key + " expects an integer");
        cfg.*m = static_cast<std::int64_t>(v);
    }
    void operator()(bool Config::* m) const {
        if (value == "true" || value == "1")
            cfg.*m = true;
        else if (value == "false" || value == "0")
            cfg.*m = false;
        else
            throw ConfigError("config: key " + key + " expects true/false");
    }
    void operator()(std::vector<double> Config::* m) const {
        std::vector<double> out;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(parse_double(item, key));
        }
        if (out.empty()) throw ConfigError("config: key " + key + " expects a nonempty list");
        cfg.*m = out;
    }
};

struct Format {
    std::string operator()(double v) const { return fmt_double(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::vector<double>& v) const {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ",";
            out += fmt_double(v[i]);
        }
        return out;
    }
};

std::string format_field(const Config& cfg, const ConfigValue& ref) {
    return std::visit(
        [&](auto member) { return Format{}(cfg.*member); }, ref);
}

}  // namespace

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& f : config_fields()) {
            if (key == f.key) {
                std::visit([&](auto member) { Assign{cfg, key, value}(member); }, f.ref);
                found = true;
                break;
            }
        }
        if (!found)
            throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
    }
    validate_config(cfg);
    return cfg;
}

std::string config_canonical(const Config& cfg) {
    std::string out;
    for (const auto& f : config_fields()) {
        out += f.key;
        out += "=";
        out += format_field(cfg, f.ref);
        out += "\n";
    }
    return out;
}

void save_config(const Config& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("config: cannot write " + path);
    for (const auto& f : config_fields())
        out << f.key << " = " << format_field(cfg, f.ref) << "\n";
}

std::string config_hash(const Config& cfg) {
    // FNV-1a 64-bit
    const std::string s = config_canonical(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

namespace {

bool divides(double small, double big) {
    const double r = big / small;
    return std::abs(r - std::round(r)) < 1e-9;
}

}  // namespace

void validate_config(const Config& cfg) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError("config: " + msg);
    };
    require(cfg.gravity > 0, "vehicle.gravity must be positive");
    require(cfg.hover_thrust > 0 && cfg.hover_thrust < 1, "vehicle.hover_thrust must be in (0,1)");
    require(cfg.tau_attitude > 0, "vehicle.tau_attitude must be positive");
    require(cfg.tilt_limit > 0, "vehicle.tilt_limit must be positive");
    require(cfg.sim_dt > 0, "sim.dt must be positive");
    require(cfg.control_period > 0 && divides(cfg.sim_dt, cfg.control_period),
            "sim.control_period must be a whole multiple of sim.dt");
    require(!cfg.library_speeds.empty(), "library.speeds must be nonempty");
    for (double v : cfg.library_speeds) require(v > 0, "library.speeds must all be positive");
    require(cfg.omega_count >= 1 && cfg.omega_count % 2 == 1,
            "library.omega_count must be odd so the straight primitive exists");
    require(cfg.t_f > 0, "library.t_f must be positive");
    require(cfg.sample_period > 0 && divides(cfg.sample_period, cfg.t_f),
            "library.sample_period must divide library.t_f");
    require(cfg.sigma_count >= 1, "lut.sigma_count must be >= 1");
    require(cfg.sigma_max >= cfg.sigma_min, "lut.sigma_max must be >= lut.sigma_min");
    require(cfg.epsilon > 0 && cfg.epsilon < 1, "lut.epsilon must be in (0,1)");
    require(cfg.n_mc >= 2, "lut.n_mc must be >= 2");
    require(cfg.n_segments >= 1, "lut.n_segments must be >= 1");
    require(cfg.disturbance_period > 0 && divides(cfg.sim_dt, cfg.disturbance_period),
            "lut.disturbance_period must be a whole multiple of sim.dt");
    require(cfg.record_period > 0 && divides(cfg.sim_dt, cfg.record_period),
            "lut.record_period must be a whole multiple of sim.dt");
    require(cfg.estimator_window > 0, "estimator.window must be positive");
    require(cfg.dryden_tau > 0, "dryden.tau must be positive");
    require(cfg.dryden_sample_period > 0, "dryden.sample_period must be positive");
    require(cfg.replan_rate > 0, "planner.replan_rate must be positive");
    require(cfg.check_period > 0 && cfg.check_period <= cfg.sample_period,
            "planner.check_period must be positive and <= library.sample_period");
}

std::vector<double> sigma_grid(const Config& cfg) {
    std::vector<double> grid(static_cast<std::size_t>(cfg.sigma_count));
    if (cfg.sigma_count == 1) {
        grid[0] = cfg.sigma_min;
        return grid;
    }
    const double step = (cfg.sigma_max - cfg.sigma_min) / static_cast<double>(cfg.sigma_count - 1);
    for (std::int64_t i = 0; i < cfg.sigma_count; ++i)
        grid[static_cast<std::size_t>(i)] = cfg.sigma_min + step * static_cast<double>(i);
    grid.back() = cfg.sigma_max;
    return grid;
}

}  // namespace amp
