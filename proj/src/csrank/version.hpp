#pragma once

namespace csrank {

inline constexpr const char* kVersion = "csrank 0.1.0";

}  // namespace csrank
