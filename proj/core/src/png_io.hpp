#pragma once

#include <string>
#include <vector>

namespace ovtrack::detail {

// 8-bit PNG access used by the grid/mask readers. `channels` comes back as
// 1 (gray) or 3 (RGB); palette/alpha/16-bit inputs are converted.
std::vector<unsigned char> read_png_bytes(const std::string& path, int* width,
                                          int* height, int* channels);

void write_png_bytes(const std::string& path, int width, int height,
                     int channels, const unsigned char* data);

}  // namespace ovtrack::detail
