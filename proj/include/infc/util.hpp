#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

namespace infc {

inline constexpr std::string_view kVersion = "0.1.0";

// FNV-1a 64-bit, used to stamp output tables with a config fingerprint.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// splitmix64; used to derive independent RNG streams from (seed, index).
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Fixed-format float for reproducible table output.
inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

enum class LogLevel { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

// Verbosity from the INFC_LOG environment variable (quiet|warn|info|debug).
inline LogLevel log_level() {
    static LogLevel lvl = [] {
        const char* env = std::getenv("INFC_LOG");
        if (!env) return LogLevel::Warn;
        std::string_view s(env);
        if (s == "quiet") return LogLevel::Quiet;
        if (s == "info") return LogLevel::Info;
        if (s == "debug") return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return lvl;
}

inline void log_msg(LogLevel lvl, const std::string& msg) {
    if (static_cast<int>(lvl) <= static_cast<int>(log_level())) {
        const char* tag = lvl == LogLevel::Debug  ? "debug"
                          : lvl == LogLevel::Info ? "info"
                                                  : "warn";
        std::fprintf(stderr, "[infc %s] %s\n", tag, msg.c_str());
    }
}

}  // namespace infc
