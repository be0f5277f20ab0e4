#pragma once

namespace dshell {
inline constexpr const char* kVersion = "0.1.0";
}
