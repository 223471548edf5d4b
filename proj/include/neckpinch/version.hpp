#pragma once

namespace neckpinch {
inline constexpr const char* kVersion = "0.1.0";
}
