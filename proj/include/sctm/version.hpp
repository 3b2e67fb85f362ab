#pragma once

namespace sctm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sctm
