#include "uot/measure_io.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uot/errors.h"

namespace uot {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

DiscreteMeasure measure_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("measure JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("weights") || !doc.contains("points"))
    throw ParseError("measure JSON needs \"weights\" and \"points\"");
  try {
    auto weights = doc.at("weights").get<std::vector<double>>();
    auto points = doc.at("points").get<std::vector<std::vector<double>>>();
    return new_measure(weights, points);
  } catch (const json::exception& e) {
    throw ParseError(std::string("measure JSON: ") + e.what());
  }
}

std::string measure_to_json(const DiscreteMeasure& m) {
  std::string out = "{\"weights\":[";
  for (Index i = 0; i < m.size(); ++i) {
    if (i) out += ',';
    out += format_double(m.weights()[i]);
  }
  out += "],\"points\":[";
  for (Index i = 0; i < m.size(); ++i) {
    if (i) out += ',';
    out += '[';
    for (Index k = 0; k < m.dim(); ++k) {
      if (k) out += ',';
      out += format_double(m.points()(i, k));
    }
    out += ']';
  }
  out += "]}";
  return out;
}

namespace {

double parse_field(std::string_view s, std::size_t line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("measure CSV line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

DiscreteMeasure measure_from_csv(std::string_view text) {
  std::vector<double> weights;
  std::vector<std::vector<double>> points;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.substr(0, 1) == "w") continue;  // header row
    }
    const auto fields = split(line);
    weights.push_back(parse_field(fields[0], line_no));
    std::vector<double> p;
    for (std::size_t k = 1; k < fields.size(); ++k) p.push_back(parse_field(fields[k], line_no));
    points.push_back(std::move(p));
  }
  return new_measure(weights, points);
}

std::string measure_to_csv(const DiscreteMeasure& m) {
  std::string out = "w";
  for (Index k = 0; k < m.dim(); ++k) out += ",x" + std::to_string(k + 1);
  out += '\n';
  for (Index i = 0; i < m.size(); ++i) {
    out += format_double(m.weights()[i]);
    for (Index k = 0; k < m.dim(); ++k) {
      out += ',';
      out += format_double(m.points()(i, k));
    }
    out += '\n';
  }
  return out;
}

DiscreteMeasure read_measure(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (path.extension() == ".csv") return measure_from_csv(text);
  return measure_from_json(text);
}

void write_measure(const std::filesystem::path& path, const DiscreteMeasure& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << (path.extension() == ".csv" ? measure_to_csv(m) : measure_to_json(m));
}

}  // namespace uot
