#pragma once

namespace cryocim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cryocim
