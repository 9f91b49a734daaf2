#pragma once

#include <string_view>

namespace ucalib {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kCalibratorFormatVersion = 1;

}  // namespace ucalib
