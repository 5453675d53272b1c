#pragma once

// JSON line configuration:
//   {"n": 2, "units": "si_per_meter", "L": [[...], [...]], "C": ..., "R": ..., "G": ...}
// L, C, R, G are n x n nested arrays in H/m, F/m, ohm/m and S/m.

#include <string>
#include <string_view>

#include "telegraph/line.hpp"

namespace telegraph {

inline constexpr std::string_view kConfigUnits = "si_per_meter";

/// Parses and validates a configuration. Syntax errors raise ParseError with
/// "source:line:column"; structural errors name the offending field, e.g.
/// "L[1][0]". Constants that fail validation raise ValidationFailure.
LineConstants parse_config(std::string_view text, std::string_view source = "config");

/// Reads `path` and parses it. Throws IOError when the file cannot be read.
LineConstants load_config(const std::string& path);

/// Serializes constants with shortest round-trip numbers, so parsing the
/// result gives bit-identical matrices.
std::string emit_config(const LineConstants& line);

/// Shortest decimal that parses back to exactly `value`.
std::string round_trip(double value);

}  // namespace telegraph
