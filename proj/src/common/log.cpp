#include "szt/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace szt::log {
namespace {

std::atomic<int> g_min_level{static_cast<int>(Level::Info)};
std::atomic<bool> g_quiet{false};
std::mutex g_mutex;

const char* level_name(Level level) {
  switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
  }
  return "info";
}

}  // namespace

void emit(Level level, std::string_view event, const nlohmann::json& fields) {
  if (g_quiet.load() || static_cast<int>(level) < g_min_level.load()) return;
  nlohmann::json line = {{"level", level_name(level)}, {"event", event}};
  if (fields.is_object()) {
    for (auto it = fields.begin(); it != fields.end(); ++it) line[it.key()] = it.value();
  }
  const std::string text = line.dump();
  std::lock_guard lock(g_mutex);
  std::cerr << text << '\n';
}

void set_min_level(Level level) { g_min_level = static_cast<int>(level); }
void set_quiet(bool quiet) { g_quiet = quiet; }

}  // namespace szt::log
