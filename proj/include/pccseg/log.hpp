#pragma once

#include <string_view>

namespace pccseg::log {

enum class Level { Debug, Info, Warn, Error, Off };

// Reads PCCSEG_LOG (debug|info|warn|error|off); defaults to info.
Level level_from_env();
void set_level(Level level);
Level level();

void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::Debug, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void error(std::string_view m) { write(Level::Error, m); }

}  // namespace pccseg::log
