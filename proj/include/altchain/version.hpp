#pragma once

namespace altchain {
inline constexpr const char* kVersion = "0.1.0";
}
