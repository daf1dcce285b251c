#pragma once

namespace chtest {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chtest
