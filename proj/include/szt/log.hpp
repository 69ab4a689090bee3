#pragma once

#include <string_view>

#include <json.hpp>

namespace szt::log {

enum class Level { Debug, Info, Warn, Error };

// One JSON object per line on stderr: {"level":..,"event":..,...fields}.
void emit(Level level, std::string_view event, const nlohmann::json& fields = nlohmann::json::object());

inline void info(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) {
  emit(Level::Info, event, fields);
}
inline void warn(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) {
  emit(Level::Warn, event, fields);
}

void set_min_level(Level level);
// Silences all output; used by tests that exercise warning paths.
void set_quiet(bool quiet);

}  // namespace szt::log
