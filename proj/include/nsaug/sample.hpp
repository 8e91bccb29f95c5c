#pragma once

#include <optional>
#include <string>

#include "nsaug/image.hpp"
#include "nsaug/masks.hpp"

namespace nsaug {

struct LabeledSample {
    Image image;
    std::optional<InstanceMaskSet> masks;
    std::optional<int> domain;
    std::string id;

    void validate() const {
        image.validate();
        if (masks) {
            if (masks->height != image.height || masks->width != image.width) {
                throw ValidationError("sample " + id + ": mask shape does not match image");
            }
            masks->validate();
        }
    }
};

// Resizes/crops a sample to size x size: crop when larger (reflect-pad when
// smaller), identical geometry for image and masks. Instances falling fully
// outside the crop are dropped with a warning.
LabeledSample fit_sample(const LabeledSample& s, int size);

}  // namespace nsaug
