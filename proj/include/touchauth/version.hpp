#pragma once

namespace touchauth {

inline constexpr const char* kToolkitVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace touchauth
