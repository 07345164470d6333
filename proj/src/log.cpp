#include "pccseg/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace pccseg::log {
namespace {

std::atomic<Level> g_level{level_from_env()};
std::mutex g_mutex;

const char* tag(Level level) {
    switch (level) {
        case Level::Debug: return "debug";
        case Level::Info: return "info";
        case Level::Warn: return "warn";
        case Level::Error: return "error";
        default: return "";
    }
}

}  // namespace

Level level_from_env() {
    const char* env = std::getenv("PCCSEG_LOG");
    if (!env)
        return Level::Info;
    const std::string v(env);
    if (v == "debug") return Level::Debug;
    if (v == "warn") return Level::Warn;
    if (v == "error") return Level::Error;
    if (v == "off") return Level::Off;
    return Level::Info;
}

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void write(Level lvl, std::string_view message) {
    if (lvl < g_level.load() || lvl == Level::Off)
        return;
    std::lock_guard lock(g_mutex);
    std::cerr << "[pccseg " << tag(lvl) << "] " << message << '\n';
}

}  // namespace pccseg::log
