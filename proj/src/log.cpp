#include "hkge/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace hkge {

void configure_logging() {
  if (!spdlog::get("hkge")) spdlog::set_default_logger(spdlog::stderr_color_mt("hkge"));
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  const char* env = std::getenv("HETERO_KGE_LOG");
  if (!env || !*env) {
    spdlog::set_level(spdlog::level::info);
    return;
  }
  const auto level = spdlog::level::from_str(env);
  // from_str maps unknown names to off; only honour it when asked for.
  if (level == spdlog::level::off && std::string(env) != "off") {
    spdlog::set_level(spdlog::level::info);
    spdlog::warn("HETERO_KGE_LOG={} not recognised, using info", env);
    return;
  }
  spdlog::set_level(level);
}

}  // namespace hkge
