#include "pal/platform.hpp"

#include <stdexcept>
#include <thread>

namespace pal {

PlatformInfo detect_platform(std::optional<int> override_cores) {
  PlatformInfo info;
  if (override_cores) {
    if (*override_cores < 1) throw std::invalid_argument("core override must be at least 1");
    info.cores = *override_cores;
    info.source = PlatformInfo::Source::Overridden;
    return info;
  }
  unsigned int detected = std::thread::hardware_concurrency();
  info.source = PlatformInfo::Source::Detected;
  if (detected == 0) {
    info.cores = 1;
    info.detection_fallback = true;
  } else {
    info.cores = static_cast<int>(detected);
  }
  return info;
}

}  // namespace pal
