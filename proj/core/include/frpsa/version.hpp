#pragma once

namespace frpsa {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace frpsa
