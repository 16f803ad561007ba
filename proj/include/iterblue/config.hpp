#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iterblue/simulate.hpp"

namespace iterblue {

/// Parses the flat `key = value` experiment config format. `#` starts a
/// comment; vectors are bracketed comma lists, matrices nested lists or
/// diag(...); the estimator list holds bare identifiers. Missing keys take
/// the default experiment values (5-tap impulse response, x = [1 0.5 0.25],
/// 31-point noise grid from 1e-8 to 1e-3, 10 iterations, 10000 trials).
/// Unknown keys, malformed numbers, and violated invariants raise ParseError
/// naming the key and line.
SweepConfig parse_config(std::string_view text);
SweepConfig parse_config_file(const std::string& path);

/// Canonical text form; parse(serialize(cfg)) reproduces cfg exactly.
std::string serialize_config(const SweepConfig& cfg);

/// The same canonical content as key/value pairs, for report comment blocks.
std::vector<std::pair<std::string, std::string>> config_meta(
    const SweepConfig& cfg);

/// Full-precision number formatting used by configs and reports
/// (scientific, round-trip exact).
std::string format_double(double v);

}  // namespace iterblue
