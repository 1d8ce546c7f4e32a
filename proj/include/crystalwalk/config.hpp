#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crystalwalk/kernels.hpp"
#include "crystalwalk/walker.hpp"

namespace crystalwalk {

// Seed used when neither the command line, the config file, nor the
// environment provides one.
inline constexpr std::uint64_t kDefaultSeed = 20240915;

// A fully resolved run description: the transition table plus the scale
// and output knobs shared by the simulate/verify entry points.
struct RunConfig {
    TransitionTable table;
    std::int64_t steps = 1'048'576;
    std::int64_t replicates = 250'000;
    std::uint64_t seed = kDefaultSeed;
    bool seed_set = false;
    SimMode mode = SimMode::Summary;
    std::string trajectory_out;
    std::string summary_out;
    std::string report_out;
};

// Built-in configurations addressable as "builtin:<name>".
std::vector<std::string> builtin_names();
RunConfig builtin_config(const std::string& name);

// Parse a JSON document. Unknown keys, malformed rows, and out-of-range
// values raise ConfigError naming the offending key.
RunConfig parse_config(const std::string& json_text);

// Load from a file path or a "builtin:<name>" reference.
RunConfig load_config(const std::string& path_or_builtin);

}  // namespace crystalwalk
