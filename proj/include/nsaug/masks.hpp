#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsaug/image.hpp"

namespace nsaug {

// Binary H x W mask, one byte per pixel (0 or 1).
struct Mask {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> data;

    Mask() = default;
    Mask(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w, 0) {}

    uint8_t& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }

    size_t count() const;
    bool none() const { return count() == 0; }
    bool same_shape(const Mask& o) const { return height == o.height && width == o.width; }
    bool operator==(const Mask& o) const {
        return height == o.height && width == o.width && data == o.data;
    }
};

Mask mask_hflip(const Mask& m);
Mask mask_vflip(const Mask& m);
Mask mask_rot90(const Mask& m, int k);
Mask mask_resize_nearest(const Mask& m, int out_h, int out_w);
Mask mask_center_crop(const Mask& m, int out_h, int out_w);
Mask mask_pad_zero_to(const Mask& m, int out_h, int out_w);
Mask mask_fit_to(const Mask& m, int out_h, int out_w);
Mask mask_dilate(const Mask& m, int radius);
Mask mask_erode(const Mask& m, int radius);

size_t mask_intersection(const Mask& a, const Mask& b);
size_t mask_union(const Mask& a, const Mask& b);

// Ordered collection of per-instance binary masks over one image. Invariants:
// every instance non-empty, instances pairwise disjoint, all shapes equal.
struct InstanceMaskSet {
    int height = 0;
    int width = 0;
    std::vector<Mask> instances;

    InstanceMaskSet() = default;
    InstanceMaskSet(int h, int w) : height(h), width(w) {}

    void validate() const;
    bool same_content(const InstanceMaskSet& o) const;

    // Union of all instances as one mask.
    Mask foreground() const;
};

// Builds a set from possibly-overlapping masks: a pixel claimed by several
// masks stays with the earliest instance; later instances lose it (a warning
// names the pixel count moved). Instances that end up empty are dropped with
// a warning. `origin` is used in messages.
InstanceMaskSet resolve_overlaps(int height, int width, std::vector<Mask> masks,
                                 const std::string& origin);

// Whole-set geometric transforms. Flips and rotations keep every instance's
// pixel count; nearest resize can empty an instance, which is then dropped
// with a warning naming `origin`.
InstanceMaskSet masks_hflip(const InstanceMaskSet& s);
InstanceMaskSet masks_vflip(const InstanceMaskSet& s);
InstanceMaskSet masks_rot90(const InstanceMaskSet& s, int k);
InstanceMaskSet masks_resize_nearest(const InstanceMaskSet& s, int out_h, int out_w,
                                     const std::string& origin);

}  // namespace nsaug
