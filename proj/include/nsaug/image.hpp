#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nsaug/util.hpp"

namespace nsaug {

// H x W x 3 raster, values in [0,1], row-major with interleaved channels.
// Grayscale sources are replicated across the three channels at load time.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<float> data;  // size height*width*3

    Image() = default;
    Image(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w * 3, 0.f) {}

    static Image filled(int h, int w, float r, float g, float b);

    float& at(int y, int x, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
    float at(int y, int x, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * 3 + c];
    }

    bool same_shape(const Image& o) const { return height == o.height && width == o.width; }
    size_t pixel_count() const { return static_cast<size_t>(height) * width; }

    // Throws ValidationError if any value falls outside [0,1] or is non-finite.
    void validate() const;
};

float luminance(const Image& img, int y, int x);
Image clamp01(Image img);

Image resize_bilinear(const Image& img, int out_h, int out_w);
Image hflip(const Image& img);
Image vflip(const Image& img);
// Counter-clockwise quarter turns; k is taken mod 4.
Image rot90(const Image& img, int k);
Image center_crop(const Image& img, int out_h, int out_w);
// Reflect-pads (no repeated edge sample) to at least out_h x out_w, then crops.
Image pad_reflect_to(const Image& img, int out_h, int out_w);
// Crop if larger, reflect-pad if smaller; the standard "fit to model size" op.
Image fit_to(const Image& img, int out_h, int out_w);

}  // namespace nsaug
