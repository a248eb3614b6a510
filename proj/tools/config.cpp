#include "config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "tvortex/energy.hpp"
#include "tvortex/errors.hpp"

namespace tvortex::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
}

double positive(const json& v, const std::string& path) {
    const double x = number(v, path);
    if (!(x > 0.0)) fail(path, "must be positive");
    return x;
}

int integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const auto x = v.get<long long>();
    if (x < 1 || x > (1LL << 30)) fail(path, "must be a positive integer");
    return static_cast<int>(x);
}

std::string text(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
    std::vector<double> out;
    if (v.is_array()) {
        if (v.empty()) fail(path, "must not be empty");
        for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], path + "[" + std::to_string(k) + "]"));
    } else {
        out.push_back(number(v, path));
    }
    return out;
}

struct Field {
    bool required;
    std::function<void(const json&, const std::string&, RunConfig&)> read;
};

using Schema = std::map<std::string, Field>;

void check_object(const json& v, const std::string& path, const Schema& schema, RunConfig& cfg) {
    if (!v.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : v.items()) {
        if (!schema.contains(key)) fail(path + "." + key, "unknown key");
    }
    for (const auto& [key, field] : schema) {
        const std::string sub = path + "." + key;
        if (!v.contains(key)) {
            if (field.required) fail(sub, "missing required key");
            continue;
        }
        field.read(v.at(key), sub, cfg);
    }
}

const Schema& green_schema() {
    static const Schema s = {
        {"n_table",
         {true,
          [](const json& v, const std::string& p, RunConfig& c) {
              c.green.n_table = integer(v, p);
              const int n = c.green.n_table;
              if (n < 16 || (n & (n - 1)) != 0) fail(p, "must be a power of two >= 16");
          }}},
        {"cutoff_radius",
         {true, [](const json& v, const std::string& p, RunConfig& c) { c.green.cutoff_radius = positive(v, p); }}},
        {"cache_path", {false, [](const json& v, const std::string& p, RunConfig& c) { c.green.cache_path = text(v, p); }}},
    };
    return s;
}

void read_vortices(const json& v, const std::string& path, RunConfig& cfg) {
    if (!v.is_array()) fail(path, "expected an array");
    if (v.size() < 2) fail(path, "at least two vortices are required");
    static const std::map<std::string, int> keys = {{"x", 0}, {"y", 1}, {"d", 2}};
    for (std::size_t k = 0; k < v.size(); ++k) {
        const std::string p = path + "[" + std::to_string(k) + "]";
        const json& e = v[k];
        if (!e.is_object()) fail(p, "expected an object {x, y, d}");
        for (const auto& [key, value] : e.items())
            if (!keys.contains(key)) fail(p + "." + key, "unknown key");
        for (const auto& [key, idx] : keys)
            if (!e.contains(key)) fail(p + "." + key, "missing required key");
        VortexSpec s;
        s.x = number(e.at("x"), p + ".x");
        s.y = number(e.at("y"), p + ".y");
        if (!e.at("d").is_number_integer()) fail(p + ".d", "expected an integer");
        s.d = e.at("d").get<int>();
        if (s.d != 1 && s.d != -1) fail(p + ".d", "degree must be +1 or -1");
        cfg.vortices.push_back(s);
    }
    int total = 0;
    for (const auto& s : cfg.vortices) total += s.d;
    if (total != 0) fail(path, "degrees must sum to zero");
}

void read_q0(const json& v, const std::string& path, RunConfig& cfg) {
    if (v.is_string()) {
        if (v.get<std::string>() != "auto") fail(path, "expected \"auto\" or [qx, qy]");
        cfg.q0.reset();
        return;
    }
    if (!v.is_array() || v.size() != 2) fail(path, "expected \"auto\" or [qx, qy]");
    cfg.q0 = Vec2{number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

Schema schema_for(const std::string& command) {
    auto cmd = Field{true, [](const json& v, const std::string& p, RunConfig& c) { c.command = text(v, p); }};
    auto lambda = Field{true, [](const json& v, const std::string& p, RunConfig& c) { c.lambdas = number_list(v, p); }};
    auto dt = Field{true, [](const json& v, const std::string& p, RunConfig& c) { c.dt = positive(v, p); }};
    auto t_max = Field{true, [](const json& v, const std::string& p, RunConfig& c) {
                           c.t_max = number(v, p);
                           if (c.t_max < 0.0) fail(p, "must be non-negative");
                       }};
    auto out = Field{true, [](const json& v, const std::string& p, RunConfig& c) { c.output_dir = text(v, p); }};
    auto green = Field{true, [](const json& v, const std::string& p, RunConfig& c) { check_object(v, p, green_schema(), c); }};
    auto vortices = Field{true, read_vortices};
    auto q0 = Field{false, read_q0};
    auto stop = Field{false, [](const json& v, const std::string& p, RunConfig& c) { c.collision_stop_radius = positive(v, p); }};
    auto sample = Field{false, [](const json& v, const std::string& p, RunConfig& c) { c.sample_stride = integer(v, p); }};
    auto track = Field{false, [](const json& v, const std::string& p, RunConfig& c) { c.track_stride = integer(v, p); }};
    auto grid = Field{true, [](const json& v, const std::string& p, RunConfig& c) {
                          c.grid_n = integer(v, p);
                          if (*c.grid_n < 8 || (*c.grid_n & (*c.grid_n - 1)) != 0) fail(p, "must be a power of two >= 8");
                      }};
    auto epsilon = Field{true, [](const json& v, const std::string& p, RunConfig& c) {
                             c.epsilon = positive(v, p);
                             if (!(*c.epsilon < 1.0)) fail(p, "must be below 1");
                         }};

    if (command == "ode")
        return {{"command", cmd}, {"lambda", lambda}, {"dt", dt}, {"t_max", t_max}, {"vortices", vortices},
                {"q0", q0}, {"collision_stop_radius", stop}, {"sample_stride", sample}, {"output_dir", out},
                {"green", green}};
    if (command == "sym")
        return {{"command", cmd},
                {"mode", {true,
                          [](const json& v, const std::string& p, RunConfig& c) {
                              c.mode = text(v, p);
                              if (c.mode != "2v" && c.mode != "4v") fail(p, "must be \"2v\" or \"4v\"");
                          }}},
                {"alpha0", {true, [](const json& v, const std::string& p, RunConfig& c) { c.alpha0 = number(v, p); }}},
                {"beta0", {true, [](const json& v, const std::string& p, RunConfig& c) { c.beta0 = number(v, p); }}},
                {"lambda", lambda}, {"dt", dt}, {"t_max", t_max}, {"collision_stop_radius", stop},
                {"sample_stride", sample}, {"output_dir", out}, {"green", green}};
    if (command == "pde")
        return {{"command", cmd}, {"lambda", lambda}, {"epsilon", epsilon}, {"grid_n", grid}, {"dt", dt},
                {"t_max", t_max}, {"vortices", vortices}, {"q0", q0}, {"track_stride", track},
                {"output_dir", out}, {"green", green}};
    if (command == "compare")
        return {{"command", cmd},
                {"lambda", lambda},
                {"epsilon_list", {true,
                                  [](const json& v, const std::string& p, RunConfig& c) {
                                      if (!v.is_array()) fail(p, "expected an array");
                                      c.epsilon_list = number_list(v, p);
                                      for (std::size_t k = 0; k < c.epsilon_list.size(); ++k)
                                          if (!(c.epsilon_list[k] > 0.0 && c.epsilon_list[k] < 1.0))
                                              fail(p + "[" + std::to_string(k) + "]", "must lie in (0, 1)");
                                  }}},
                {"grid_n", grid}, {"dt", dt}, {"t_max", t_max}, {"vortices", vortices}, {"q0", q0},
                {"track_stride", track}, {"output_dir", out}, {"green", green}};
    if (command == "green")
        return {{"command", cmd}, {"output_dir", {false, out.read}}, {"green", green}};
    throw ConfigError("$.command: unknown command \"" + command + "\"");
}

}  // namespace

RunConfig parse_config(const json& doc, const std::string& command) {
    RunConfig cfg;
    check_object(doc, "$", schema_for(command), cfg);
    if (cfg.command != command)
        fail("$.command", "is \"" + cfg.command + "\" but the subcommand is \"" + command + "\"");
    return cfg;
}

VortexConfiguration build_configuration(const RunConfig& cfg) {
    std::vector<Vec2> pts;
    std::vector<int> deg;
    for (const auto& v : cfg.vortices) {
        pts.push_back({v.x, v.y});
        deg.push_back(v.d);
    }
    try {
        return make_configuration(pts, deg, cfg.q0);
    } catch (const InvalidConfiguration& e) {
        throw ConfigError(std::string(cfg.q0 ? "$.q0: " : "$.vortices: ") + e.what());
    }
}

json resolved_config(const json& doc, const RunConfig& cfg) {
    json out = doc;
    if (!cfg.vortices.empty()) {
        const auto c = build_configuration(cfg);
        out["q0"] = {c.q.x, c.q.y};
    }
    out["output_dir"] = cfg.output_dir.string();
    out["green"]["n_table"] = cfg.green.n_table;
    out["green"]["cutoff_radius"] = cfg.green.cutoff_radius;
    if (!cfg.green.cache_path.empty()) out["green"]["cache_path"] = cfg.green.cache_path.string();
    return out;
}

}  // namespace tvortex::cli
