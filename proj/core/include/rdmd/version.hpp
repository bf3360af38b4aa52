#pragma once

namespace rdmd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rdmd
