#pragma once

namespace ptspec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ptspec
