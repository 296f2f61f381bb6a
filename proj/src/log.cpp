#include "merlion/log.hpp"

#include <cstdlib>
#include <iostream>

namespace merlion::log {

Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("MERLION_LOG");
    if (env == nullptr) return Level::warn;
    const std::string v(env);
    if (v == "error") return Level::error;
    if (v == "warn") return Level::warn;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
  }();
  return level;
}

void emit(Level level, const std::string& message) {
  if (level > threshold()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << message << "\n";
}

}  // namespace merlion::log
