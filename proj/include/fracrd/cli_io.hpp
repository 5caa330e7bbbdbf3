#pragma once

#include "fracrd/eigen.hpp"
#include "fracrd/evolution.hpp"
#include "fracrd/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fracrd {

enum class RunMode {
    run,
    porous,
    spectral,
};

enum class InitialPreset {
    gaussian_bump,
    scaled_eigen,
    constant,
    file,
};

std::string to_string(RunMode m);
std::string to_string(InitialPreset p);

struct RunConfig {
    RunMode mode = RunMode::run;
    int dim = 1;
    double L = 1.0;
    int n = 65;
    SimParams sim;

    KernelShape kernel = KernelShape::box;
    double kernel_width = 0.25;
    double kernel_delta0 = 0.1;
    double kernel_eta = 0.1;

    InitialPreset initial = InitialPreset::gaussian_bump;
    double initial_amplitude = 0.1;
    double initial_width = 0.3;
    double initial_center = 0.0;
    /// scaled_eigen: u0 = c e1 with int u0 e1 = h0_factor (1 + lambda1).
    double h0_factor = 2.0;
    std::string initial_file;

    std::uint64_t seed = 0;

    Grid grid() const { return Grid::make(dim, L, n); }
    /// Canonical key = value text; parse_config(echo()) reproduces the config.
    std::string echo() const;
    bool operator==(const RunConfig&) const = default;
};

/// Keys that must appear in every configuration.
const std::vector<std::string>& required_config_keys();

/// Line-based `key = value` text with `#` comments. Unknown keys, missing
/// required keys, bad values and parameter-box violations raise ConfigError
/// with the offending line. Relative file paths resolve against base_dir.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Sets one key from its text form, as a config line would.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Initial field of a configuration; scaled_eigen solves the eigenproblem.
Field make_initial(const RunConfig& cfg);
Kernel make_kernel(const RunConfig& cfg);

/// Writes to a temporary sibling, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// scalars.csv, field_XXXX.bin and meta in dir (created if needed).
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                      const RunConfig& cfg);

struct CliOptions {
    std::filesystem::path config;
    std::filesystem::path out = "out";
    int threads = 1;
    bool seed_set = false;
    std::uint64_t seed = 0;
};

/// Exit codes: 0 success, 2 blow-up (run), 1 error or failed check.
int cmd_run(const RunConfig& cfg, const CliOptions& opt);
int cmd_eigen(const RunConfig& cfg, const CliOptions& opt);
int cmd_blowup(const RunConfig& cfg, const CliOptions& opt);
int cmd_sweep(const RunConfig& cfg, const CliOptions& opt, const std::string& axis,
              const std::vector<double>& values);
int cmd_verify(const std::string& suite, const CliOptions& opt);

}  // namespace fracrd
