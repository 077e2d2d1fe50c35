#pragma once

namespace spatent {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spatent
