#pragma once

namespace wsaw {

inline constexpr const char* version_string = "0.1.0";

}  // namespace wsaw
