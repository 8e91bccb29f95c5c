#pragma once

#include "nsaug/image.hpp"

namespace nsaug {

// Hexcone RGB -> HSV with every channel on [0,1]; H wraps on [0,1) and is 0
// by convention for grays. Stored as a 3-channel raster (H, S, V).
Image rgb_to_hsv(const Image& rgb);

// Inverse of rgb_to_hsv. H is taken modulo 1, S and V are clamped to [0,1].
Image hsv_to_rgb(const Image& hsv);

void rgb_to_hsv_pixel(float r, float g, float b, float& h, float& s, float& v);
void hsv_to_rgb_pixel(float h, float s, float v, float& r, float& g, float& b);

// Brightness and contrast in RGB (pivot 0.5), then saturation scaling and a
// hue shift on the wrapped [0,1) circle. Output clamped to [0,1].
Image color_jitter(Image img, float brightness, float contrast, float saturation,
                   float hue_shift);

}  // namespace nsaug
