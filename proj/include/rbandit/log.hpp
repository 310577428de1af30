#pragma once

// Stderr logging gated by RB_LOG=error|info|debug (default info).

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace rbandit::log {

enum class Level { Error = 0, Info = 1, Debug = 2 };

inline Level level_from_env() {
    const char* v = std::getenv("RB_LOG");
    if (!v) return Level::Info;
    const std::string_view s(v);
    if (s == "error") return Level::Error;
    if (s == "debug") return Level::Debug;
    return Level::Info;
}

inline Level& current() {
    static Level lvl = level_from_env();
    return lvl;
}

inline void write(Level lvl, std::string_view tag, std::string_view msg) {
    if (static_cast<int>(lvl) > static_cast<int>(current())) return;
    std::cerr << "[" << tag << "] " << msg << '\n';
}

inline void error(std::string_view msg) { write(Level::Error, "error", msg); }
inline void info(std::string_view msg) { write(Level::Info, "info", msg); }
inline void debug(std::string_view msg) { write(Level::Debug, "debug", msg); }

} // namespace rbandit::log
