#pragma once

namespace tokaudit {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tokaudit
