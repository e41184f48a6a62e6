#pragma once

#include <spdlog/spdlog.h>

namespace hkge {

/// Applies HETERO_KGE_LOG (trace|debug|info|warn|error|off) to the default
/// logger. Unset means info.
void configure_logging();

}  // namespace hkge
