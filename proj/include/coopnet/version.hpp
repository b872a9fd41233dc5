#pragma once

namespace coopnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace coopnet
