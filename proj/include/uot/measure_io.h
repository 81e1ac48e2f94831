#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "uot/measures.h"

namespace uot {

// JSON: {"weights": [...], "points": [[...], ...]}
DiscreteMeasure measure_from_json(std::string_view text);
std::string measure_to_json(const DiscreteMeasure& m);

// CSV: header "w,x1,...,xd", then one atom per line.
DiscreteMeasure measure_from_csv(std::string_view text);
std::string measure_to_csv(const DiscreteMeasure& m);

// Dispatches on the extension (.json or .csv).
DiscreteMeasure read_measure(const std::filesystem::path& path);
void write_measure(const std::filesystem::path& path, const DiscreteMeasure& m);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace uot
