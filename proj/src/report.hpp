#pragma once

#include <string>

#include <json.hpp>

namespace bf::report {

using Json = nlohmann::ordered_json;

// Byte-deterministic JSON: insertion order preserved, floats printed with
// %.17g (round-trips exactly), integers as integers, non-finite floats as
// the strings "inf"/"-inf"/"nan", two-space indent, trailing newline.
std::string serialize_json(const Json& root);

// CSV rendering. A report with a "trace" object ({"columns": [...],
// "rows": [[...], ...]}) becomes a plain table; anything else flattens to
// dotted key,value lines (arrays joined with ';').
std::string serialize_csv(const Json& root);

// Writes via <path>.tmp then rename so readers never observe a torn file.
void write_atomic(const std::string& path, const std::string& bytes);

std::string format_real(double x);

Json make_report(const std::string& check_id);

} // namespace bf::report
