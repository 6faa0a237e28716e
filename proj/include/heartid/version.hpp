#pragma once

namespace heartid {

inline constexpr const char* kToolName = "heartid";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace heartid
