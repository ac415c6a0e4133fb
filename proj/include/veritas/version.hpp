#pragma once

#include <string_view>

namespace veritas {

inline constexpr std::string_view kHarnessVersion = "0.1.0";

}  // namespace veritas
