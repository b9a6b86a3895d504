#include "scenekg/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace scenekg::log {
namespace {

Level from_env() {
  const char* raw = std::getenv("SCENEKG_LOG");
  if (raw == nullptr) return Level::Warn;
  const std::string v(raw);
  if (v == "error") return Level::Error;
  if (v == "info") return Level::Info;
  if (v == "debug") return Level::Debug;
  return Level::Warn;
}

std::atomic<int>& current() {
  static std::atomic<int> level{static_cast<int>(from_env())};
  return level;
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

constexpr const char* kNames[] = {"error", "warn", "info", "debug"};

}  // namespace

Level threshold() { return static_cast<Level>(current().load()); }

void set_threshold(Level level) { current().store(static_cast<int>(level)); }

void write(Level level, std::string_view message) {
  if (static_cast<int>(level) > current().load()) return;
  std::lock_guard lock(sink_mutex());
  std::cerr << "scenekg[" << kNames[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace scenekg::log
