#pragma once

namespace hrisk {
inline constexpr const char* kVersion = "0.3.1";
}
