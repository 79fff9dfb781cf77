#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace bf::report {

namespace {

void append_escaped(const std::string& s, std::string& out) {
  out += '"';
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x",
                        static_cast<unsigned>(static_cast<unsigned char>(ch)));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

void append_value(const Json& v, std::string& out, int depth) {
  const std::string pad(2 * size_t(depth), ' ');
  const std::string pad_in(2 * size_t(depth + 1), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        append_escaped(it.key(), out);
        out += ": ";
        append_value(it.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        append_value(item, out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::string:
      append_escaped(v.get<std::string>(), out);
      return;
    case Json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v.get<int64_t>()));
      out += buf;
      return;
    }
    case Json::value_t::number_unsigned: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%llu",
                    static_cast<unsigned long long>(v.get<uint64_t>()));
      out += buf;
      return;
    }
    case Json::value_t::number_float:
      out += format_real(v.get<double>());
      return;
    case Json::value_t::null:
      out += "null";
      return;
    default:
      throw io_error("unsupported JSON value type in report");
  }
}

// CSV cells carry strings raw and non-finite floats as bare words, unlike
// JSON where "nan" must be quoted to stay parseable.
std::string csv_scalar(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    double x = v.get<double>();
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  }
  std::string out;
  append_value(v, out, 0);
  return out;
}

void flatten(const Json& v, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& rows) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      flatten(it.value(), key, rows);
    }
    return;
  }
  if (v.is_array()) {
    bool scalar_only = true;
    for (const auto& item : v)
      if (item.is_object() || item.is_array()) scalar_only = false;
    if (scalar_only) {
      std::string joined;
      bool first = true;
      for (const auto& item : v) {
        if (!first) joined += ';';
        first = false;
        joined += csv_scalar(item);
      }
      rows.push_back({prefix, joined});
      return;
    }
    int idx = 0;
    for (const auto& item : v)
      flatten(item, prefix + "." + std::to_string(idx++), rows);
    return;
  }
  rows.push_back({prefix, csv_scalar(v)});
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += '"';
  return out;
}

} // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string serialize_json(const Json& root) {
  std::string out;
  append_value(root, out, 0);
  out += '\n';
  return out;
}

std::string serialize_csv(const Json& root) {
  std::string out;
  if (root.contains("trace") && root["trace"].is_object() &&
      root["trace"].contains("columns")) {
    const Json& tr = root["trace"];
    bool first = true;
    for (const auto& col : tr["columns"]) {
      if (!first) out += ',';
      first = false;
      out += csv_field(col.get<std::string>());
    }
    out += '\n';
    for (const auto& row : tr["rows"]) {
      first = true;
      for (const auto& cell : row) {
        if (!first) out += ',';
        first = false;
        out += csv_field(csv_scalar(cell));
      }
      out += '\n';
    }
    return out;
  }
  out += "key,value\n";
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(root, "", rows);
  for (const auto& [k, v] : rows) out += csv_field(k) + "," + csv_field(v) + "\n";
  return out;
}

void write_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw io_error("short write: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw io_error("cannot move " + tmp + " into place");
}

Json make_report(const std::string& check_id) {
  Json root = Json::object();
  root["check_id"] = check_id;
  root["schema"] = 1;
  return root;
}

} // namespace bf::report
