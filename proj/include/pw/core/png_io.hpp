#pragma once

#include <string>

#include "pw/core/image.hpp"

namespace pw {

/// Reads any 8-bit PNG; palette/gray/alpha variants are expanded, so the
/// result has 1 or 3 channels. 16-bit files are reduced to 8 bits.
ImageU8 read_png8(const std::string& path);

/// Reads a 16-bit grayscale PNG (fixed-point disparity export format).
ImageU16 read_png_gray16(const std::string& path);

void write_png_rgb8(const std::string& path, const ImageU8& img);
void write_png_gray8(const std::string& path, const ImageU8& img);
void write_png_gray16(const std::string& path, const ImageU16& img);

/// Writes a binary mask as a 1-bit grayscale PNG. Nonzero pixels map to 1.
void write_png_mask1(const std::string& path, const ImageU8& mask);

}  // namespace pw
