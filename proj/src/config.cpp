#include "crystalwalk/config.hpp"

#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "crystalwalk/errors.hpp"

namespace crystalwalk {

namespace {

using nlohmann::json;

TransitionTable uniform_table(LatticeKind kind, double p) {
    TransitionTable t;
    t.kind = kind;
    t.p = p;
    t.alpha = 0.5;
    const double horizontal_mass = (1.0 - p) / 3.0;
    if (kind == LatticeKind::Ice1h) {
        for (auto& row : t.ice_rows) row = {horizontal_mass, horizontal_mass, horizontal_mass};
    } else {
        for (auto& sheet : t.graphite_rows) {
            sheet[0] = {horizontal_mass, horizontal_mass, horizontal_mass};
            sheet[1] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        }
    }
    return t;
}

double require_number(const json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return j.get<double>();
}

std::int64_t require_integer(const json& j, const std::string& key) {
    if (!j.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
    return j.get<std::int64_t>();
}

std::array<double, 3> parse_row(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError("config key '" + key + "' must be an array of 3 probabilities");
    std::array<double, 3> row{};
    for (int k = 0; k < 3; ++k) row[k] = require_number(j[k], key);
    return row;
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"ice-symmetric", "graphite-symmetric", "ice-zigzag", "ice-vertical"};
}

RunConfig builtin_config(const std::string& name) {
    RunConfig cfg;
    if (name == "ice-symmetric") {
        cfg.table = uniform_table(LatticeKind::Ice1h, 0.2);
    } else if (name == "graphite-symmetric") {
        cfg.table = uniform_table(LatticeKind::Graphite2h, 0.2);
    } else if (name == "ice-zigzag") {
        cfg.table = uniform_table(LatticeKind::Ice1h, 0.0);
        for (auto& row : cfg.table.ice_rows) row = {1.0, 0.0, 0.0};
    } else if (name == "ice-vertical") {
        cfg.table = uniform_table(LatticeKind::Ice1h, 1.0);
        for (auto& row : cfg.table.ice_rows) row = {0.0, 0.0, 0.0};
    } else {
        throw ConfigError("unknown builtin config '" + name + "'");
    }
    validate(cfg.table);
    return cfg;
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

    static const std::set<std::string> allowed = {
        "lattice",    "a",    "h",    "p",          "alpha",
        "horizontal", "steps", "replicates", "seed", "mode",
        "trajectory_out", "summary_out", "report_out"};
    for (const auto& item : doc.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError("unknown config key '" + item.key() + "'");
    }

    RunConfig cfg = builtin_config("ice-symmetric");
    TransitionTable& t = cfg.table;

    if (doc.contains("lattice")) {
        const std::string lattice = doc["lattice"].is_string()
                                        ? doc["lattice"].get<std::string>()
                                        : throw ConfigError("config key 'lattice' must be a string");
        if (lattice == "ice") {
            t.kind = LatticeKind::Ice1h;
        } else if (lattice == "graphite") {
            t.kind = LatticeKind::Graphite2h;
        } else {
            throw ConfigError("config key 'lattice' must be \"ice\" or \"graphite\"");
        }
    }
    if (doc.contains("p")) t.p = require_number(doc["p"], "p");
    // Keep the uniform rows consistent with the requested p unless
    // explicit rows follow below.
    {
        const TransitionTable fresh = uniform_table(t.kind, t.p);
        t.ice_rows = fresh.ice_rows;
        t.graphite_rows = fresh.graphite_rows;
    }
    if (doc.contains("a")) t.geometry.a = require_number(doc["a"], "a");
    if (doc.contains("h")) t.geometry.h = require_number(doc["h"], "h");
    if (doc.contains("alpha")) t.alpha = require_number(doc["alpha"], "alpha");

    if (doc.contains("horizontal")) {
        const json& rows = doc["horizontal"];
        if (t.kind == LatticeKind::Ice1h) {
            if (!rows.is_array() || rows.size() != 2)
                throw ConfigError("config key 'horizontal' must be a 2x3 array for ice");
            for (int i = 0; i < 2; ++i) t.ice_rows[i] = parse_row(rows[i], "horizontal");
        } else {
            if (!rows.is_array() || rows.size() != 2)
                throw ConfigError("config key 'horizontal' must be a 2x2x3 array for graphite");
            for (int i = 0; i < 2; ++i) {
                const json& sheet = rows[i];
                if (!sheet.is_array() || sheet.size() != 2)
                    throw ConfigError("config key 'horizontal' must be a 2x2x3 array for graphite");
                for (int j = 0; j < 2; ++j)
                    t.graphite_rows[i][j] = parse_row(sheet[j], "horizontal");
            }
        }
    }

    if (doc.contains("steps")) {
        cfg.steps = require_integer(doc["steps"], "steps");
        if (cfg.steps < 0) throw ConfigError("config key 'steps' must be non-negative");
    }
    if (doc.contains("replicates")) {
        cfg.replicates = require_integer(doc["replicates"], "replicates");
        if (cfg.replicates < 2) throw ConfigError("config key 'replicates' must be at least 2");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
            throw ConfigError("config key 'seed' must be an unsigned integer");
        const std::int64_t raw = doc["seed"].is_number_unsigned()
                                     ? static_cast<std::int64_t>(doc["seed"].get<std::uint64_t>())
                                     : doc["seed"].get<std::int64_t>();
        cfg.seed = static_cast<std::uint64_t>(raw);
        cfg.seed_set = true;
    }
    if (doc.contains("mode")) {
        const std::string mode = doc["mode"].is_string()
                                     ? doc["mode"].get<std::string>()
                                     : throw ConfigError("config key 'mode' must be a string");
        if (mode == "summary") {
            cfg.mode = SimMode::Summary;
        } else if (mode == "trajectory") {
            cfg.mode = SimMode::Trajectory;
        } else {
            throw ConfigError("config key 'mode' must be \"summary\" or \"trajectory\"");
        }
    }
    using PathField = std::pair<const char*, std::string RunConfig::*>;
    const std::array<PathField, 3> path_fields = {{{"trajectory_out", &RunConfig::trajectory_out},
                                                   {"summary_out", &RunConfig::summary_out},
                                                   {"report_out", &RunConfig::report_out}}};
    for (const auto& [key, member] : path_fields) {
        if (doc.contains(key)) {
            if (!doc[key].is_string())
                throw ConfigError(std::string("config key '") + key + "' must be a string");
            cfg.*member = doc[key].get<std::string>();
        }
    }

    try {
        validate(t);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid transition table: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path_or_builtin) {
    constexpr const char* prefix = "builtin:";
    if (path_or_builtin.rfind(prefix, 0) == 0)
        return builtin_config(path_or_builtin.substr(std::string(prefix).size()));
    std::ifstream in(path_or_builtin);
    if (!in) throw ConfigError("cannot open config file '" + path_or_builtin + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace crystalwalk
