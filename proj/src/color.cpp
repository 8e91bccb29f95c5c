#include "nsaug/color.hpp"

#include <algorithm>
#include <cmath>

namespace nsaug {

void rgb_to_hsv_pixel(float r, float g, float b, float& h, float& s, float& v) {
    float mx = std::max({r, g, b});
    float mn = std::min({r, g, b});
    float delta = mx - mn;
    v = mx;
    s = mx > 0.f ? delta / mx : 0.f;
    if (delta <= 0.f) {
        h = 0.f;
        return;
    }
    if (mx == r) {
        h = (g - b) / delta;
    } else if (mx == g) {
        h = 2.f + (b - r) / delta;
    } else {
        h = 4.f + (r - g) / delta;
    }
    h /= 6.f;
    if (h < 0.f) h += 1.f;
    if (h >= 1.f) h -= 1.f;
}

void hsv_to_rgb_pixel(float h, float s, float v, float& r, float& g, float& b) {
    h = h - std::floor(h);
    s = std::clamp(s, 0.f, 1.f);
    v = std::clamp(v, 0.f, 1.f);
    float h6 = h * 6.f;
    int sector = std::min(5, static_cast<int>(h6));
    float f = h6 - sector;
    float p = v * (1.f - s);
    float q = v * (1.f - s * f);
    float t = v * (1.f - s * (1.f - f));
    switch (sector) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
}

Image rgb_to_hsv(const Image& rgb) {
    Image out(rgb.height, rgb.width);
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x) {
            rgb_to_hsv_pixel(rgb.at(y, x, 0), rgb.at(y, x, 1), rgb.at(y, x, 2),
                             out.at(y, x, 0), out.at(y, x, 1), out.at(y, x, 2));
        }
    }
    return out;
}

Image hsv_to_rgb(const Image& hsv) {
    Image out(hsv.height, hsv.width);
    for (int y = 0; y < hsv.height; ++y) {
        for (int x = 0; x < hsv.width; ++x) {
            hsv_to_rgb_pixel(hsv.at(y, x, 0), hsv.at(y, x, 1), hsv.at(y, x, 2),
                             out.at(y, x, 0), out.at(y, x, 1), out.at(y, x, 2));
        }
    }
    return out;
}

Image color_jitter(Image img, float brightness, float contrast, float saturation,
                   float hue_shift) {
    for (auto& v : img.data) v = (v * brightness - 0.5f) * contrast + 0.5f;
    Image hsv = rgb_to_hsv(clamp01(std::move(img)));
    for (int y = 0; y < hsv.height; ++y) {
        for (int x = 0; x < hsv.width; ++x) {
            float h = hsv.at(y, x, 0) + hue_shift;
            hsv.at(y, x, 0) = h - std::floor(h);
            hsv.at(y, x, 1) = std::min(1.0f, std::max(0.0f, hsv.at(y, x, 1) * saturation));
        }
    }
    return hsv_to_rgb(hsv);
}

}  // namespace nsaug
