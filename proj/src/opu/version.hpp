#pragma once

namespace opu {
inline constexpr const char* kVersion = "1.0.0";
}
