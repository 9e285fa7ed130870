#pragma once

namespace stt {
inline constexpr const char* kVersion = "0.1.0";
}  // namespace stt
