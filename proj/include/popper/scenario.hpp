#pragma once

// JSON scenario files.  Every failure (unreadable file, malformed JSON with line/column,
// missing or inconsistent fields) surfaces as ConfigError.

#include <filesystem>
#include <string_view>

#include "popper/experiments.hpp"

namespace popper {

Scenario parse_scenario(std::string_view json_text, std::string_view origin = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace popper
