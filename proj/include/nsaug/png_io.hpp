#pragma once

#include <string>

#include "nsaug/image.hpp"
#include "nsaug/masks.hpp"

namespace nsaug {

// Decodes an 8- or 16-bit PNG (gray, gray+alpha, palette, RGB, or RGBA) into
// a [0,1] float RGB image. 16-bit sources are normalized by 65535, 8-bit by
// 255; the alpha channel is dropped; gray is replicated across channels.
Image read_image_png(const std::string& path);

// Reads a PNG as a binary mask: any nonzero sample (first channel) is set.
Mask read_mask_png(const std::string& path);

// Writes 8-bit RGB. Values are clamped to [0,1] and rounded.
void write_image_png(const std::string& path, const Image& img);

// Writes an 8-bit grayscale PNG with 0/255 values.
void write_mask_png(const std::string& path, const Mask& mask);

}  // namespace nsaug
