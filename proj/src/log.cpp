#include "painmine/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace painmine {

namespace {

LogLevel threshold_from_env() {
    const char* env = std::getenv("PAINMINE_LOG");
    if (env == nullptr) {
        return LogLevel::Info;
    }
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
    if (std::strcmp(env, "error") == 0) return LogLevel::Error;
    return LogLevel::Info;
}

const char* level_name(LogLevel level) {
    switch (level) {
        case LogLevel::Debug: return "debug";
        case LogLevel::Info: return "info";
        case LogLevel::Warn: return "warn";
        case LogLevel::Error: return "error";
    }
    return "?";
}

} // namespace

void log(LogLevel level, const std::string& msg) {
    static const LogLevel threshold = threshold_from_env();
    if (level < threshold) {
        return;
    }
    std::fprintf(stderr, "[%s] %s\n", level_name(level), msg.c_str());
}

} // namespace painmine
