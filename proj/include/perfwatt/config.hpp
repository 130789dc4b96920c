#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace perfwatt {

/// Flat view of a `key = value` configuration file with `[section]` headers;
/// keys are stored as "section.key". `#` and `;` start comments.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(std::string_view text, const std::string& origin);
ConfigMap load_config_file(const std::filesystem::path& path);

/// Comma-separated positive integers, strictly increasing.
std::vector<unsigned> parse_thread_list(std::string_view text);
std::optional<bool> parse_bool(std::string_view text);

}  // namespace perfwatt
