#pragma once

namespace proxysel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace proxysel
