#pragma once

namespace tnlab {

inline constexpr const char* kVersion = "tnlab 0.1.0";

}  // namespace tnlab
