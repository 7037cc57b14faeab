#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

#include "delayopt/errors.hpp"

namespace delayopt::cli {

enum class LogLevel : int { error = 0, warn = 1, info = 2, debug = 3 };

// Verbosity comes from DELAYOPT_LOG (error|warn|info|debug), default warn.
// An unrecognized value is a configuration error.
inline LogLevel log_level_from_env() {
    const char* raw = std::getenv("DELAYOPT_LOG");
    if (raw == nullptr || *raw == '\0') {
        return LogLevel::warn;
    }
    const std::string v(raw);
    if (v == "error") return LogLevel::error;
    if (v == "warn") return LogLevel::warn;
    if (v == "info") return LogLevel::info;
    if (v == "debug") return LogLevel::debug;
    fail(errc::usage, "DELAYOPT_LOG must be one of error|warn|info|debug, got '" + v + "'");
}

inline LogLevel& current_log_level() {
    static LogLevel level = LogLevel::warn;
    return level;
}

inline void log(LogLevel level, const std::string& message) {
    if (static_cast<int>(level) > static_cast<int>(current_log_level())) {
        return;
    }
    const char* tag = "";
    switch (level) {
        case LogLevel::error: tag = "error"; break;
        case LogLevel::warn: tag = "warning"; break;
        case LogLevel::info: tag = "info"; break;
        case LogLevel::debug: tag = "debug"; break;
    }
    std::cerr << "delayopt " << tag << ": " << message << '\n';
}

inline void log_warnings(const WarningList& warnings) {
    for (const Warning& w : warnings) {
        log(LogLevel::warn, w.code + ": " + w.message);
    }
}

}  // namespace delayopt::cli
