#pragma once

namespace grassrisk {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace grassrisk
