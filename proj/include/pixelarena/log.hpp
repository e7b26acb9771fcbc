#pragma once

// Thin spdlog front end. The level comes from PIXELARENA_LOG
// (trace, debug, info, warn, error, off; default warn). Output goes to stderr.

#include <spdlog/spdlog.h>

namespace pixelarena::log {

spdlog::logger& logger();

template <class... Args>
void debug(fmt::format_string<Args...> fmt, Args&&... args) {
    logger().debug(fmt, std::forward<Args>(args)...);
}
template <class... Args>
void info(fmt::format_string<Args...> fmt, Args&&... args) {
    logger().info(fmt, std::forward<Args>(args)...);
}
template <class... Args>
void warn(fmt::format_string<Args...> fmt, Args&&... args) {
    logger().warn(fmt, std::forward<Args>(args)...);
}
template <class... Args>
void error(fmt::format_string<Args...> fmt, Args&&... args) {
    logger().error(fmt, std::forward<Args>(args)...);
}

}  // namespace pixelarena::log
