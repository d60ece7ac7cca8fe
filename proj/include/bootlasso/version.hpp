#pragma once

namespace bootlasso {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bootlasso
