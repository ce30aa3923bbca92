#pragma once

namespace sfprime {

inline constexpr const char* version = "0.1.0";
inline constexpr unsigned table_format_version = 1;

}  // namespace sfprime
