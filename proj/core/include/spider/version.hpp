#pragma once

namespace spider {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "spider";

}  // namespace spider
