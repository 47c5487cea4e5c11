#include "bmot/measure_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "bmot/error.hpp"

namespace bmot {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

DiscreteMeasure parse_measure_csv(std::string_view text) {
  std::vector<double> weights;
  std::vector<double> coords;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  bool seen_data = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto fields = split(line, ',');
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (!parse_double(fields[k], values[k])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (!seen_data && weights.empty()) {
        seen_data = true;  // header
        if (end == text.size()) break;
        continue;
      }
      throw InputError("line " + std::to_string(line_no) + ": non-numeric field");
    }
    seen_data = true;
    if (fields.size() < 2) {
      throw InputError("line " + std::to_string(line_no) + ": expected weight and coordinates");
    }
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns) {
      throw InputError("line " + std::to_string(line_no) + ": inconsistent column count");
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw InputError("line " + std::to_string(line_no) + ": NaN/Inf");
    }
    weights.push_back(values[0]);
    coords.insert(coords.end(), values.begin() + 1, values.end());
    if (end == text.size()) break;
  }
  if (weights.empty()) throw InputError("CSV measure has no atoms");
  return DiscreteMeasure(columns - 1, std::move(weights), std::move(coords));
}

DiscreteMeasure parse_measure_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid JSON measure: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("atoms")) {
    throw InputError("JSON measure needs \"dim\" and \"atoms\"");
  }
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() <= 0) {
    throw InputError("\"dim\" must be a positive integer");
  }
  const auto dim = static_cast<std::size_t>(doc["dim"].get<long long>());
  if (!doc["atoms"].is_array()) throw InputError("\"atoms\" must be an array");
  std::vector<double> weights;
  std::vector<double> coords;
  for (const auto& atom : doc["atoms"]) {
    if (!atom.is_object() || !atom.contains("w") || !atom.contains("x") ||
        !atom["w"].is_number() || !atom["x"].is_array()) {
      throw InputError("each atom needs numeric \"w\" and array \"x\"");
    }
    if (atom["x"].size() != dim) throw InputError("atom coordinate count differs from dim");
    const double w = atom["w"].get<double>();
    if (!std::isfinite(w)) throw InputError("NaN/Inf weight");
    weights.push_back(w);
    for (const auto& v : atom["x"]) {
      if (!v.is_number()) throw InputError("non-numeric coordinate");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw InputError("NaN/Inf coordinate");
      coords.push_back(x);
    }
  }
  if (weights.empty()) throw InputError("JSON measure has no atoms");
  return DiscreteMeasure(dim, std::move(weights), std::move(coords));
}

DiscreteMeasure read_measure_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return json ? parse_measure_json(text) : parse_measure_csv(text);
}

std::string format_exact(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_report(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  (void)ec;
  return std::string(buf, ptr);
}

std::string to_csv(const DiscreteMeasure& m) {
  std::string out = "weight";
  for (std::size_t k = 0; k < m.dim(); ++k) out += ",x" + std::to_string(k + 1);
  out += '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += format_exact(m.weight(i));
    for (double x : m.point(i)) {
      out += ',';
      out += format_exact(x);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const DiscreteMeasure& m) {
  std::string out = "{\"dim\":" + std::to_string(m.dim()) + ",\"atoms\":[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ',';
    out += "{\"w\":" + format_exact(m.weight(i)) + ",\"x\":[";
    const auto x = m.point(i);
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k) out += ',';
      out += format_exact(x[k]);
    }
    out += "]}";
  }
  out += "]}\n";
  return out;
}

}  // namespace bmot
