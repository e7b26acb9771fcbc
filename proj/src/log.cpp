#include "pixelarena/log.hpp"

#include <cstdlib>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace pixelarena::log {

spdlog::logger& logger() {
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto l = spdlog::stderr_color_mt("pixelarena");
        l->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
        spdlog::level::level_enum level = spdlog::level::warn;
        if (const char* env = std::getenv("PIXELARENA_LOG")) level = spdlog::level::from_str(env);
        l->set_level(level);
        return l;
    }();
    return *instance;
}

}  // namespace pixelarena::log
