#pragma once

#include <string>

namespace painmine {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

// Threshold comes from the PAINMINE_LOG env var (debug|info|warn|error),
// default info. Messages go to stderr so artifact files stay clean.
void log(LogLevel level, const std::string& msg);

inline void log_debug(const std::string& msg) { log(LogLevel::Debug, msg); }
inline void log_info(const std::string& msg) { log(LogLevel::Info, msg); }
inline void log_warn(const std::string& msg) { log(LogLevel::Warn, msg); }
inline void log_error(const std::string& msg) { log(LogLevel::Error, msg); }

} // namespace painmine
