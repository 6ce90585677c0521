#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace amp {

/// All tunable parameters, with the defaults used throughout.
///
/// Serialized as a flat `key = value` file (one key per line, `#` comments).
/// See config_fields() for the full key list and save_config() for the
/// canonical on-disk form.
struct Config {
    // vehicle
    double mass = 1.0;              // [kg]
    double gravity = 9.81;          // [m/s^2]
    double hover_thrust = 0.5;      // normalized thrust that balances gravity
    double tau_attitude = 0.15;     // roll/pitch first-order lag constant [s]
    double tilt_limit = 0.5;        // max |roll|, |pitch| command [rad]
    double yaw_rate_limit = 2.0;    // max |yaw rate| command [rad/s]

    // cascaded position/velocity controller
    double kp_pos = 2.0;
    double kp_vel = 4.0;
    double ki_vel = 0.1;
    double kd_vel = 0.2;
    double kp_yaw = 2.0;
    double vel_cmd_limit = 3.0;     // desired-velocity clamp [m/s]
    double int_limit = 2.0;         // per-axis integrator clamp [m/s]

    // closed-loop simulation
    double sim_dt = 0.01;           // integrator step [s]
    double control_period = 0.05;   // controller update period [s]

    // motion primitive library
    std::vector<double> library_speeds = {0.5, 1.0};  // [m/s]
    std::int64_t omega_count = 11;                    // angular-speed grid size (odd)
    double omega_max = 1.0471975511965976;            // [rad/s]
    double t_f = 3.0;                                 // primitive duration [s]
    double sample_period = 0.1;                       // primitive sample period [s]

    // margin lookup table build
    double sigma_min = 0.0;           // [m/s^2]
    double sigma_max = 5.0;           // [m/s^2]
    std::int64_t sigma_count = 9;
    double epsilon = 0.05;            // tube risk bound
    std::int64_t n_mc = 1000;         // Monte Carlo rollouts per cell
    std::int64_t n_segments = 10;     // tube-fit time bins
    std::int64_t lut_seed = 1;
    double disturbance_period = 3.0;  // redraw period for rollout disturbance [s]
    double init_pos_std = 0.05;       // rollout initial position spread [m]
    double init_vel_std = 0.05;       // rollout initial velocity spread [m/s]
    double record_period = 0.05;      // rollout state recording period [s]
    bool cross_track_include_z = true;

    // online disturbance estimator
    double estimator_window = 3.0;    // moving-variance window [s]

    // wind generators
    double dryden_tau = 1.0;          // gust correlation time [s]
    double dryden_sigma_low = 1.0;    // [m/s^2]
    double dryden_sigma_med = 2.2;
    double dryden_sigma_high = 3.4;
    double dryden_sample_period = 0.05;

    // planner
    double replan_rate = 5.0;         // [Hz]
    double check_period = 0.05;       // tube collision sampling bound [s]
    bool above_grid_clamp = false;    // false: abort above grid; true: clamp to max
};

using ConfigValue = std::variant<double Config::*, bool Config::*, std::int64_t Config::*,
                                 std::vector<double> Config::*>;

struct ConfigField {
    const char* key;
    ConfigValue ref;
};

/// Key table in canonical order (drives load, save, and hashing).
const std::vector<ConfigField>& config_fields();

/// Parse a `key = value` file over the defaults. Unknown keys are errors.
Config load_config(const std::string& path);

/// Write the full effective configuration in canonical form.
void save_config(const Config& cfg, const std::string& path);

/// Canonical serialization of every field ("key=value\n" in table order).
std::string config_canonical(const Config& cfg);

/// FNV-1a hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const Config& cfg);

/// Throw ConfigError on inconsistent values (non-positive periods,
/// period ratios that are not whole numbers, empty speed sets, ...).
void validate_config(const Config& cfg);

/// The precomputation grid of disturbance standard deviations, ascending.
std::vector<double> sigma_grid(const Config& cfg);

}  // namespace amp
