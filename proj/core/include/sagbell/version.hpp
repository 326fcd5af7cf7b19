#pragma once

namespace sagbell {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sagbell
