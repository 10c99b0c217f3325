#pragma once

namespace gridlat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gridlat
