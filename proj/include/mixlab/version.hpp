#pragma once

namespace mixlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mixlab
