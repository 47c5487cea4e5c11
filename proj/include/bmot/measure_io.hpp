#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "bmot/measure.hpp"

namespace bmot {

// CSV: optional header line, then `weight,x1,...,xd` per row; d is inferred
// from the column count. JSON: {"dim": d, "atoms": [{"w": w, "x": [...]}]}.
// Both readers reject NaN/Inf and throw InputError on malformed input.

DiscreteMeasure parse_measure_csv(std::string_view text);
DiscreteMeasure parse_measure_json(std::string_view text);

/// Dispatches on extension (.json, otherwise CSV).
DiscreteMeasure read_measure_file(const std::string& path);

/// Writers use the shortest representation that parses back to the same double.
std::string to_csv(const DiscreteMeasure& m);
std::string to_json(const DiscreteMeasure& m);

/// Shortest round-trip decimal form of `v`.
std::string format_exact(double v);

/// `v` printed with 12 significant digits (report format).
std::string format_report(double v);

}  // namespace bmot
