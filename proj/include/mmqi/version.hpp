#pragma once

namespace mmqi {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace mmqi
