#pragma once

namespace rwhec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rwhec
