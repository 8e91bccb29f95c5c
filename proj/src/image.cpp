#include "nsaug/image.hpp"

#include <algorithm>
#include <cmath>

namespace nsaug {

Image Image::filled(int h, int w, float r, float g, float b) {
    Image img(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.at(y, x, 0) = r;
            img.at(y, x, 1) = g;
            img.at(y, x, 2) = b;
        }
    }
    return img;
}

void Image::validate() const {
    if (height <= 0 || width <= 0) throw ValidationError("image has empty shape");
    if (data.size() != pixel_count() * 3) throw ValidationError("image buffer size mismatch");
    for (float v : data) {
        if (!std::isfinite(v) || v < 0.f || v > 1.f) {
            throw ValidationError("image value outside [0,1]: " + std::to_string(v));
        }
    }
}

float luminance(const Image& img, int y, int x) {
    return 0.299f * img.at(y, x, 0) + 0.587f * img.at(y, x, 1) + 0.114f * img.at(y, x, 2);
}

Image clamp01(Image img) {
    for (float& v : img.data) v = std::clamp(v, 0.f, 1.f);
    return img;
}

Image resize_bilinear(const Image& img, int out_h, int out_w) {
    if (out_h <= 0 || out_w <= 0) throw ValidationError("resize to empty shape");
    Image out(out_h, out_w);
    const float sy = static_cast<float>(img.height) / out_h;
    const float sx = static_cast<float>(img.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        // pixel-center alignment
        float fy = (y + 0.5f) * sy - 0.5f;
        int y0 = static_cast<int>(std::floor(fy));
        float wy = fy - y0;
        int y0c = std::clamp(y0, 0, img.height - 1);
        int y1c = std::clamp(y0 + 1, 0, img.height - 1);
        for (int x = 0; x < out_w; ++x) {
            float fx = (x + 0.5f) * sx - 0.5f;
            int x0 = static_cast<int>(std::floor(fx));
            float wx = fx - x0;
            int x0c = std::clamp(x0, 0, img.width - 1);
            int x1c = std::clamp(x0 + 1, 0, img.width - 1);
            for (int c = 0; c < 3; ++c) {
                float top = img.at(y0c, x0c, c) * (1 - wx) + img.at(y0c, x1c, c) * wx;
                float bot = img.at(y1c, x0c, c) * (1 - wx) + img.at(y1c, x1c, c) * wx;
                out.at(y, x, c) = top * (1 - wy) + bot * wy;
            }
        }
    }
    return out;
}

Image hflip(const Image& img) {
    Image out(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y, img.width - 1 - x, c);
    return out;
}

Image vflip(const Image& img) {
    Image out(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(img.height - 1 - y, x, c);
    return out;
}

Image rot90(const Image& img, int k) {
    k = ((k % 4) + 4) % 4;
    if (k == 0) return img;
    if (k == 2) return hflip(vflip(img));
    Image out(img.width, img.height);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                if (k == 1) {
                    // CCW: out(y,x) = in(x, W-1-y) with W the input width
                    out.at(y, x, c) = img.at(x, img.width - 1 - y, c);
                } else {
                    out.at(y, x, c) = img.at(img.height - 1 - x, y, c);
                }
            }
        }
    }
    return out;
}

Image center_crop(const Image& img, int out_h, int out_w) {
    if (out_h > img.height || out_w > img.width) throw ValidationError("crop larger than image");
    int oy = (img.height - out_h) / 2;
    int ox = (img.width - out_w) / 2;
    Image out(out_h, out_w);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y + oy, x + ox, c);
    return out;
}

namespace {
int reflect_index(int i, int n) {
    if (n == 1) return 0;
    int period = 2 * n - 2;
    i = ((i % period) + period) % period;
    return i < n ? i : period - i;
}
}  // namespace

Image pad_reflect_to(const Image& img, int out_h, int out_w) {
    int h = std::max(out_h, img.height);
    int w = std::max(out_w, img.width);
    int oy = (h - img.height) / 2;
    int ox = (w - img.width) / 2;
    Image out(h, w);
    for (int y = 0; y < h; ++y) {
        int sy = reflect_index(y - oy, img.height);
        for (int x = 0; x < w; ++x) {
            int sx = reflect_index(x - ox, img.width);
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(sy, sx, c);
        }
    }
    return center_crop(out, out_h, out_w);
}

Image fit_to(const Image& img, int out_h, int out_w) {
    if (img.height == out_h && img.width == out_w) return img;
    if (img.height >= out_h && img.width >= out_w) return center_crop(img, out_h, out_w);
    return pad_reflect_to(img, out_h, out_w);
}

}  // namespace nsaug
