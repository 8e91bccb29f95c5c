#pragma once

#include <vector>

#include "nsaug/image.hpp"

namespace nsaug {

// Concatenated per-channel histograms of an HSV raster; each channel block
// sums to 1 and every entry is nonnegative. Any contrast preprocessing
// (CLAHE) happens before this call.
using HsvFeature = std::vector<double>;

struct FeatureParams {
    int bins_per_channel = 16;

    void validate() const;
};

HsvFeature extract_features(const Image& rgb, const FeatureParams& params = {});

void validate_feature(const HsvFeature& f, int bins_per_channel);

}  // namespace nsaug
