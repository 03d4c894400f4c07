#include "logging.hpp"

#include <cstdlib>
#include <mutex>

#include <spdlog/spdlog.h>

namespace crossflow::detail {

void init_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("CROSSFLOW_LOG_LEVEL")) {
      spdlog::set_level(spdlog::level::from_str(level));
    }
  });
}

}  // namespace crossflow::detail
