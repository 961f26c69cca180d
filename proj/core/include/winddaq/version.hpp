#pragma once

namespace winddaq {

inline constexpr const char* kProjectName = "winddaq";
inline constexpr const char* kVersionString = "1.0.0";

}  // namespace winddaq
