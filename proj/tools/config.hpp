#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvortex/torus.hpp"

namespace tvortex::cli {

// Raised for anything wrong with the configuration; the message starts with
// the JSON path of the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GreenConfig {
    int n_table = 1024;
    double cutoff_radius = 0.25;
    std::filesystem::path cache_path;
};

struct VortexSpec {
    double x = 0.0;
    double y = 0.0;
    int d = 0;
};

struct RunConfig {
    std::string command;
    std::vector<double> lambdas;  // one run per value
    std::optional<double> epsilon;
    std::vector<double> epsilon_list;
    std::optional<int> grid_n;
    double dt = 0.0;
    double t_max = 0.0;
    std::vector<VortexSpec> vortices;
    std::optional<Vec2> q0;  // empty means "auto"
    double collision_stop_radius = 1e-3;
    int sample_stride = 1;
    int track_stride = 100;
    std::string mode;  // sym: "2v" or "4v"
    double alpha0 = 0.0;
    double beta0 = 0.0;
    std::filesystem::path output_dir;
    GreenConfig green;
};

// Validates the whole document against the schema of `command` before any
// computation. Unknown keys, missing keys and wrong types are rejected.
RunConfig parse_config(const nlohmann::json& doc, const std::string& command);

// Positions, degrees and q; q0 "auto" resolves to default_q0 and an explicit
// q0 must lie on its coset within kCosetTolerance.
VortexConfiguration build_configuration(const RunConfig& cfg);

// The configuration with q0 resolved, as written to manifest.json.
nlohmann::json resolved_config(const nlohmann::json& doc, const RunConfig& cfg);

}  // namespace tvortex::cli
