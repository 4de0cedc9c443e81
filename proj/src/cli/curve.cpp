#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "csflab/cli.hpp"

namespace csflab::cli {

namespace {

constexpr std::array<std::string_view, 5> kUnits = {
    "bits/sub-channel/use", "bits/sub-channel/block", "bits/use", "bits/block", "1",
};

bool is_feedback_unit(std::string_view unit) {
  return unit == "bits/sub-channel/block" || unit == "bits/block";
}

double parse_number(const std::string& text, const std::string& what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError(what + ": '" + text + "' is not a finite number");
  }
  return v;
}

}  // namespace

std::vector<double> Grid::values() const {
  const double span = (stop - start) / step;
  const auto count = static_cast<std::int64_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    out.push_back(start + static_cast<double>(i) * step);
  }
  return out;
}

Grid parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() == 1) {
    const double v = parse_number(parts[0], "grid");
    return {v, v, 1.0};
  }
  if (parts.size() != 3) throw ConfigError("grid '" + spec + "' must be start:stop:step");
  Grid g{parse_number(parts[0], "grid start"), parse_number(parts[1], "grid stop"),
         parse_number(parts[2], "grid step")};
  if (!(g.step > 0.0)) throw ConfigError("grid '" + spec + "': step must be positive");
  if (g.stop < g.start) throw ConfigError("grid '" + spec + "': stop is below start");
  if ((g.stop - g.start) / g.step > 1e6) throw ConfigError("grid '" + spec + "' has over 1e6 points");
  return g;
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_number(item, "list"));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

bool is_known_unit(std::string_view unit) {
  for (auto u : kUnits) {
    if (u == unit) return true;
  }
  return false;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.9g", v);
  return buf.data();
}

void TradeoffCurve::validate() const {
  if (scheme.empty()) throw std::logic_error("curve without a scheme label");
  if (columns.empty()) throw std::logic_error("curve " + scheme + " has no columns");
  for (const auto& c : columns) {
    if (!is_known_unit(c.unit)) {
      throw std::logic_error("curve " + scheme + ": unknown unit '" + c.unit + "'");
    }
  }
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw std::logic_error("curve " + scheme + ": ragged row");
  }
  if (is_feedback_unit(columns[0].unit)) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (!(rows[i][0] > rows[i - 1][0])) {
        throw std::logic_error("curve " + scheme + ": feedback column not strictly increasing");
      }
    }
  }
}

std::string TradeoffCurve::to_csv() const {
  std::string out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out += ',';
    out += columns[j].name + "[" + columns[j].unit + "]";
  }
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out += ',';
      out += format_number(r[j]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace csflab::cli
