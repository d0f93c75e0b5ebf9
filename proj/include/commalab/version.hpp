#pragma once

namespace commalab {

inline constexpr const char* kProjectName = "commalab";
inline constexpr const char* kProjectVersion = "1.0.0";

}  // namespace commalab
