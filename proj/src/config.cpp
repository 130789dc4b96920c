#include "perfwatt/config.hpp"

#include <fstream>
#include <sstream>

#include "perfwatt/error.hpp"
#include "perfwatt/types.hpp"

namespace perfwatt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void config_error(const std::string& origin, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

ConfigMap parse_config_text(std::string_view text, const std::string& origin) {
  ConfigMap map;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;

    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) config_error(origin, line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) config_error(origin, line_no, "empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) config_error(origin, line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) config_error(origin, line_no, "empty key");
    if (section.empty()) config_error(origin, line_no, "key '" + key + "' outside any [section]");
    const std::string full = section + "." + key;
    if (map.count(full)) config_error(origin, line_no, "duplicate key '" + full + "'");
    map[full] = value;
  }
  return map;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

std::vector<unsigned> parse_thread_list(std::string_view text) {
  std::vector<unsigned> counts;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string_view token = trim(text.substr(start, comma - start));
    const auto value = parse_int64(token);
    if (!value || *value <= 0) {
      throw Error(ErrorCode::InvalidConfig, "bad thread count '" + std::string(token) + "'");
    }
    if (!counts.empty() && static_cast<unsigned>(*value) <= counts.back()) {
      throw Error(ErrorCode::InvalidConfig, "thread counts must be strictly increasing");
    }
    counts.push_back(static_cast<unsigned>(*value));
    start = comma + 1;
  }
  return counts;
}

std::optional<bool> parse_bool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  return std::nullopt;
}

}  // namespace perfwatt
