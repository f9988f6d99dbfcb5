#pragma once

#include "placelab/ga.hpp"
#include "placelab/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace placelab {

/// TOML scalar or flat array of scalars; the subset run configs need.
struct TomlValue {
    using Array = std::vector<TomlValue>;
    std::variant<bool, std::int64_t, double, std::string, Array> value;

    bool is_bool() const { return std::holds_alternative<bool>(value); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(value); }
    bool is_real() const { return std::holds_alternative<double>(value); }
    bool is_string() const { return std::holds_alternative<std::string>(value); }
    bool is_array() const { return std::holds_alternative<Array>(value); }
    double as_number() const; // int or real; DataError otherwise
};

/// section -> key -> value; keys before any [section] land in section "".
using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

/// Supports [sections], key = value, #-comments, booleans, integers, reals,
/// double-quoted strings with basic escapes, and flat arrays.
TomlTable parse_toml(std::string_view text);

struct RunConfig {
    GaConfig ga;
    ProtocolConfig protocol;
    double threshold = 0.10; // dynamic-loop drift trigger
};

/// Sections [ga], [weights], [protocol], [dynamic]; keys mirror the struct
/// fields. Unknown keys are an error so typos fail loudly. Protocol seeds
/// default to ga.seed, ga.seed+1, ... when the file names none.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(std::string_view text);

} // namespace placelab
