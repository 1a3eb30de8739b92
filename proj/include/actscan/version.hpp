#pragma once

namespace actscan {
inline constexpr const char* kToolVersion = "0.1.0";
}
