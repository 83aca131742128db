#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rach/csv.hpp"
#include "rach/simulation.hpp"

namespace rach {

/// Malformed scenario file. Carries the 1-based line (0 when not tied to a line) and the dotted key.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(int line, std::string key, const std::string& what)
      : std::runtime_error(format(line, key, what)), line_(line), key_(std::move(key)) {}

  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  static std::string format(int line, const std::string& key, const std::string& what) {
    std::string s = line > 0 ? "line " + std::to_string(line) + ": " : std::string();
    return s + key + ": " + what;
  }

  int line_;
  std::string key_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, int line, const std::string& key) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ScenarioError(line, key, "'" + std::string(text) + "' is not a valid number");
  return value;
}

inline std::vector<LoadProfile::Segment> parse_segments(std::string_view text, int line) {
  const std::string key = "load.segments";
  std::vector<LoadProfile::Segment> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string_view item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    if (item.empty()) throw ScenarioError(line, key, "empty segment");
    std::vector<std::string_view> parts;
    std::size_t p = 0;
    while (true) {
      const auto colon = item.find(':', p);
      parts.push_back(item.substr(p, colon == std::string_view::npos ? item.npos : colon - p));
      if (colon == std::string_view::npos) break;
      p = colon + 1;
    }
    if (parts.size() != 4)
      throw ScenarioError(line, key, "segment '" + std::string(item) + "' is not start:end:rate_start:rate_end");
    out.push_back({parse_number<int>(parts[0], line, key), parse_number<int>(parts[1], line, key),
                   parse_number<double>(parts[2], line, key), parse_number<double>(parts[3], line, key)});
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Reads the INI-style scenario format:
///
///   [channel]     preambles, ns_min, ns_max, alpha
///   [load]        segments = start:end:rate_start:rate_end, ...   (required)
///   [controller]  kind, window, table_max_load, acb_p, acb_window
///   [sim]         frames, backoff_window, retry_limit
///
/// `#` and `;` start comments. Unknown sections or keys are rejected.
inline Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string section;
  std::vector<LoadProfile::Segment> segments;
  bool have_segments = false;
  int segments_line = 0;
  std::map<std::string, int> seen;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto c = text.find_first_of("#;"); c != std::string_view::npos) text = text.substr(0, c);
    text = detail::trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ScenarioError(line, std::string(text), "unterminated section header");
      section = std::string(detail::trim(text.substr(1, text.size() - 2)));
      if (section != "channel" && section != "load" && section != "controller" && section != "sim")
        throw ScenarioError(line, section, "unknown section");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ScenarioError(line, std::string(text), "expected key = value");
    const std::string name(detail::trim(text.substr(0, eq)));
    const std::string_view value = detail::trim(text.substr(eq + 1));
    if (section.empty()) throw ScenarioError(line, name, "key outside of any section");
    const std::string key = section + "." + name;
    if (auto [it, fresh] = seen.emplace(key, line); !fresh)
      throw ScenarioError(line, key, "duplicate key (first set on line " + std::to_string(it->second) + ")");

    if (key == "channel.preambles") sc.channel.n_preambles = detail::parse_number<int>(value, line, key);
    else if (key == "channel.ns_min") sc.channel.n_s_min = detail::parse_number<int>(value, line, key);
    else if (key == "channel.ns_max") sc.channel.n_s_max = detail::parse_number<int>(value, line, key);
    else if (key == "channel.alpha") sc.channel.alpha = detail::parse_number<double>(value, line, key);
    else if (key == "load.segments") {
      segments = detail::parse_segments(value, line);
      have_segments = true;
      segments_line = line;
    } else if (key == "controller.kind") {
      const auto kind = parse_controller_kind(value);
      if (!kind) throw ScenarioError(line, key, "expected one of fixed, max, adaptive, acb");
      sc.controller.kind = *kind;
    } else if (key == "controller.window") sc.controller.window = detail::parse_number<int>(value, line, key);
    else if (key == "controller.table_max_load")
      sc.controller.table_max_load = detail::parse_number<double>(value, line, key);
    else if (key == "controller.acb_p") sc.controller.acb_p = detail::parse_number<double>(value, line, key);
    else if (key == "controller.acb_window") sc.controller.acb_window = detail::parse_number<int>(value, line, key);
    else if (key == "sim.frames") sc.frames = detail::parse_number<int>(value, line, key);
    else if (key == "sim.backoff_window") sc.backoff_window = detail::parse_number<int>(value, line, key);
    else if (key == "sim.retry_limit") sc.retry_limit = detail::parse_number<int>(value, line, key);
    else throw ScenarioError(line, key, "unknown key");
  }

  if (!have_segments) throw ScenarioError(0, "load.segments", "load.segments required");
  try {
    sc.profile = LoadProfile(std::move(segments));
  } catch (const ConfigError& e) {
    throw ScenarioError(segments_line, e.key(), e.reason());
  }
  try {
    sc.validate();
  } catch (const ConfigError& e) {
    const auto it = seen.find(e.key());
    throw ScenarioError(it == seen.end() ? 0 : it->second, e.key(), e.reason());
  }
  return sc;
}

inline Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(0, "scenario", "cannot open '" + path + "'");
  return parse_scenario(in);
}

inline Scenario parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

/// Canonical text form; parse_scenario(emit_scenario(s)) == s.
inline std::string emit_scenario(const Scenario& sc) {
  std::ostringstream o;
  o << "[channel]\n"
    << "preambles = " << sc.channel.n_preambles << "\n"
    << "ns_min = " << sc.channel.n_s_min << "\n"
    << "ns_max = " << sc.channel.n_s_max << "\n"
    << "alpha = " << csv::number(sc.channel.alpha) << "\n\n"
    << "[load]\nsegments = ";
  const auto& segs = sc.profile.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i) o << ", ";
    o << segs[i].start_frame << ':' << segs[i].end_frame << ':' << csv::number(segs[i].rate_start) << ':'
      << csv::number(segs[i].rate_end);
  }
  o << "\n\n[controller]\n"
    << "kind = " << to_string(sc.controller.kind) << "\n"
    << "window = " << sc.controller.window << "\n"
    << "table_max_load = " << csv::number(sc.controller.table_max_load) << "\n"
    << "acb_p = " << csv::number(sc.controller.acb_p) << "\n"
    << "acb_window = " << sc.controller.acb_window << "\n\n"
    << "[sim]\n";
  if (sc.frames > 0) o << "frames = " << sc.frames << "\n";
  o << "backoff_window = " << sc.backoff_window << "\n"
    << "retry_limit = " << sc.retry_limit << "\n";
  return o.str();
}

}  // namespace rach
