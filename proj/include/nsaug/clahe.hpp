#pragma once

#include <vector>

#include "nsaug/image.hpp"

namespace nsaug {

// Single float channel in [0,1].
struct Plane {
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Plane() = default;
    Plane(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w, 0.f) {}

    float& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
    float at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }
};

Plane image_channel(const Image& img, int c);
void set_image_channel(Image& img, int c, const Plane& p);

struct ClaheParams {
    // per-bin cap as a fraction of the tile pixel count
    float clip_limit = 0.01f;
    int tile_grid = 8;
    int bins = 256;

    void validate() const;
};

// Contrast limited adaptive histogram equalization. The image is reflect
// padded so the tile grid divides it, each tile's histogram is clipped and
// equalized (midpoint CDF), and pixels blend the four surrounding tile
// mappings bilinearly. Degenerate (<= 1x1) inputs pass through unchanged.
Plane clahe(const Plane& channel, const ClaheParams& params = {});

// CLAHE on the V channel of an RGB image, returned as RGB.
Image clahe_value_channel(const Image& rgb, const ClaheParams& params = {});

}  // namespace nsaug
