#pragma once

#include <filesystem>
#include <string>

namespace ucalib {

// FNV-1a 64-bit content digest as lowercase hex. Stable across platforms;
// used for bundle manifests, not security.
std::string fnv1a64_hex(std::string_view bytes);
std::string fnv1a64_file(const std::filesystem::path& path);

}  // namespace ucalib
