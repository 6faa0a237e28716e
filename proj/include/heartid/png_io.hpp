#pragma once

#include <string>

#include "heartid/cwt.hpp"

namespace heartid {

// 8-bit grayscale PNG with stored (uncompressed) deflate blocks; no external
// codec needed at this scale. Pixel values are clamped to [0,1] and
// quantized to 0..255. Row 0 of the scalogram (lowest frequency) is drawn at
// the bottom of the image.
void write_png_gray(const std::string& path, const Scalogram& image);

}  // namespace heartid
