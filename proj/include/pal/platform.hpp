#pragma once

#include <optional>

namespace pal {

struct PlatformInfo {
  enum class Source { Detected, Overridden };

  int cores = 1;
  Source source = Source::Detected;
  // True when detection was unavailable and cores fell back to 1; callers
  // surface this as a warning.
  bool detection_fallback = false;
};

// Logical processors visible to the process. An override (must be >= 1,
// std::invalid_argument otherwise) bypasses detection; failed detection
// falls back to one core instead of failing.
PlatformInfo detect_platform(std::optional<int> override_cores = std::nullopt);

}  // namespace pal
