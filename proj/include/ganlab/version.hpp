#pragma once

namespace ganlab {
inline constexpr const char* kVersion = "0.1.0";
}
