#pragma once

namespace moranipd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace moranipd
