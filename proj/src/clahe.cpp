#include "nsaug/clahe.hpp"

#include <algorithm>
#include <cmath>

#include "nsaug/color.hpp"
#include "nsaug/util.hpp"

namespace nsaug {

Plane image_channel(const Image& img, int c) {
    Plane p(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) p.at(y, x) = img.at(y, x, c);
    return p;
}

void set_image_channel(Image& img, int c, const Plane& p) {
    if (p.height != img.height || p.width != img.width)
        throw ValidationError("channel shape mismatch");
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) img.at(y, x, c) = p.at(y, x);
}

void ClaheParams::validate() const {
    if (clip_limit <= 0.f) throw ValidationError("clahe: clip_limit must be positive");
    if (tile_grid < 1) throw ValidationError("clahe: tile_grid must be >= 1");
    if (bins < 2) throw ValidationError("clahe: bins must be >= 2");
}

namespace {

int reflect_index(int i, int n) {
    if (n == 1) return 0;
    int period = 2 * n - 2;
    i = ((i % period) + period) % period;
    return i < n ? i : period - i;
}

}  // namespace

Plane clahe(const Plane& channel, const ClaheParams& params) {
    params.validate();
    if (channel.height <= 1 && channel.width <= 1) return channel;

    const int grid = params.tile_grid;
    const int bins = params.bins;

    // reflect-pad so the grid divides both dimensions, crop at the end
    int ph = (channel.height + grid - 1) / grid * grid;
    int pw = (channel.width + grid - 1) / grid * grid;
    Plane padded(ph, pw);
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x)
            padded.at(y, x) = channel.at(reflect_index(y, channel.height),
                                         reflect_index(x, channel.width));

    const int th = ph / grid;
    const int tw = pw / grid;
    const float area = static_cast<float>(th) * tw;
    auto bin_of = [&](float v) {
        int b = static_cast<int>(v * bins);
        return std::clamp(b, 0, bins - 1);
    };

    // per-tile clipped histogram -> midpoint-CDF mapping
    std::vector<std::vector<float>> mapping(static_cast<size_t>(grid) * grid,
                                            std::vector<float>(bins, 0.f));
    for (int ty = 0; ty < grid; ++ty) {
        for (int tx = 0; tx < grid; ++tx) {
            std::vector<float>& map = mapping[static_cast<size_t>(ty) * grid + tx];
            std::vector<float>& hist = map;  // built in place, then replaced by the CDF
            for (int y = ty * th; y < (ty + 1) * th; ++y)
                for (int x = tx * tw; x < (tx + 1) * tw; ++x)
                    hist[bin_of(padded.at(y, x))] += 1.f;

            float limit = params.clip_limit * area;
            float excess = 0.f;
            for (float& h : hist) {
                if (h > limit) {
                    excess += h - limit;
                    h = limit;
                }
            }
            float share = excess / bins;
            float cum = 0.f;
            for (int b = 0; b < bins; ++b) {
                float h = hist[b] + share;
                map[b] = (cum + 0.5f * h) / area;
                cum += h;
            }
        }
    }

    Plane out_padded(ph, pw);
    for (int y = 0; y < ph; ++y) {
        float gy = (y + 0.5f) / th - 0.5f;
        int ty0 = static_cast<int>(std::floor(gy));
        float fy = gy - ty0;
        int ty1 = std::clamp(ty0 + 1, 0, grid - 1);
        ty0 = std::clamp(ty0, 0, grid - 1);
        for (int x = 0; x < pw; ++x) {
            float gx = (x + 0.5f) / tw - 0.5f;
            int tx0 = static_cast<int>(std::floor(gx));
            float fx = gx - tx0;
            int tx1 = std::clamp(tx0 + 1, 0, grid - 1);
            tx0 = std::clamp(tx0, 0, grid - 1);
            int b = bin_of(padded.at(y, x));
            float m00 = mapping[static_cast<size_t>(ty0) * grid + tx0][b];
            float m01 = mapping[static_cast<size_t>(ty0) * grid + tx1][b];
            float m10 = mapping[static_cast<size_t>(ty1) * grid + tx0][b];
            float m11 = mapping[static_cast<size_t>(ty1) * grid + tx1][b];
            float m0 = m00 * (1.f - fx) + m01 * fx;
            float m1 = m10 * (1.f - fx) + m11 * fx;
            float v = m0 * (1.f - fy) + m1 * fy;
            out_padded.at(y, x) = std::clamp(v, 0.f, 1.f);
        }
    }

    if (ph == channel.height && pw == channel.width) return out_padded;
    Plane out(channel.height, channel.width);
    for (int y = 0; y < channel.height; ++y)
        for (int x = 0; x < channel.width; ++x) out.at(y, x) = out_padded.at(y, x);
    return out;
}

Image clahe_value_channel(const Image& rgb, const ClaheParams& params) {
    Image hsv = rgb_to_hsv(rgb);
    set_image_channel(hsv, 2, clahe(image_channel(hsv, 2), params));
    return hsv_to_rgb(hsv);
}

}  // namespace nsaug
