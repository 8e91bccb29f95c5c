#include "nsaug/features.hpp"

#include <algorithm>
#include <cmath>

#include "nsaug/color.hpp"
#include "nsaug/util.hpp"

namespace nsaug {

void FeatureParams::validate() const {
    if (bins_per_channel < 2) throw ValidationError("features: bins_per_channel must be >= 2");
}

HsvFeature extract_features(const Image& rgb, const FeatureParams& params) {
    params.validate();
    Image hsv = rgb_to_hsv(rgb);

    const int bins = params.bins_per_channel;
    HsvFeature f(static_cast<size_t>(bins) * 3, 0.0);
    const double npix = static_cast<double>(hsv.height) * hsv.width;
    for (int y = 0; y < hsv.height; ++y) {
        for (int x = 0; x < hsv.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                int b = std::clamp(static_cast<int>(hsv.at(y, x, c) * bins), 0, bins - 1);
                f[static_cast<size_t>(c) * bins + b] += 1.0;
            }
        }
    }
    for (double& v : f) v /= npix;
    return f;
}

void validate_feature(const HsvFeature& f, int bins_per_channel) {
    if (f.size() != static_cast<size_t>(bins_per_channel) * 3)
        throw ValidationError("feature dimension mismatch");
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (int b = 0; b < bins_per_channel; ++b) {
            double v = f[static_cast<size_t>(c) * bins_per_channel + b];
            if (v < 0.0 || !std::isfinite(v)) throw ValidationError("feature entry out of range");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("feature block not normalized");
    }
}

}  // namespace nsaug
