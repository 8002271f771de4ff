#pragma once

namespace borelsum {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace borelsum
