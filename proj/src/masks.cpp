#include "nsaug/masks.hpp"

#include <algorithm>
#include <cmath>

#include "nsaug/sample.hpp"

namespace nsaug {

size_t Mask::count() const {
    size_t n = 0;
    for (uint8_t v : data) n += v;
    return n;
}

Mask mask_hflip(const Mask& m) {
    Mask out(m.height, m.width);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) out.at(y, x) = m.at(y, m.width - 1 - x);
    return out;
}

Mask mask_vflip(const Mask& m) {
    Mask out(m.height, m.width);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) out.at(y, x) = m.at(m.height - 1 - y, x);
    return out;
}

Mask mask_rot90(const Mask& m, int k) {
    k = ((k % 4) + 4) % 4;
    if (k == 0) return m;
    if (k == 2) return mask_hflip(mask_vflip(m));
    Mask out(m.width, m.height);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            out.at(y, x) = (k == 1) ? m.at(x, m.width - 1 - y) : m.at(m.height - 1 - x, y);
        }
    }
    return out;
}

Mask mask_resize_nearest(const Mask& m, int out_h, int out_w) {
    if (out_h <= 0 || out_w <= 0) throw ValidationError("mask resize to empty shape");
    Mask out(out_h, out_w);
    const float sy = static_cast<float>(m.height) / out_h;
    const float sx = static_cast<float>(m.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        int syi = std::min(m.height - 1, static_cast<int>((y + 0.5f) * sy));
        for (int x = 0; x < out_w; ++x) {
            int sxi = std::min(m.width - 1, static_cast<int>((x + 0.5f) * sx));
            out.at(y, x) = m.at(syi, sxi);
        }
    }
    return out;
}

Mask mask_center_crop(const Mask& m, int out_h, int out_w) {
    if (out_h > m.height || out_w > m.width) throw ValidationError("mask crop larger than mask");
    int oy = (m.height - out_h) / 2;
    int ox = (m.width - out_w) / 2;
    Mask out(out_h, out_w);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) out.at(y, x) = m.at(y + oy, x + ox);
    return out;
}

Mask mask_pad_zero_to(const Mask& m, int out_h, int out_w) {
    int h = std::max(out_h, m.height);
    int w = std::max(out_w, m.width);
    int oy = (h - m.height) / 2;
    int ox = (w - m.width) / 2;
    Mask out(h, w);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) out.at(y + oy, x + ox) = m.at(y, x);
    return mask_center_crop(out, out_h, out_w);
}

Mask mask_fit_to(const Mask& m, int out_h, int out_w) {
    if (m.height == out_h && m.width == out_w) return m;
    if (m.height >= out_h && m.width >= out_w) return mask_center_crop(m, out_h, out_w);
    return mask_pad_zero_to(m, out_h, out_w);
}

Mask mask_dilate(const Mask& m, int radius) {
    Mask out(m.height, m.width);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            uint8_t v = 0;
            for (int dy = -radius; dy <= radius && !v; ++dy) {
                for (int dx = -radius; dx <= radius && !v; ++dx) {
                    int yy = y + dy, xx = x + dx;
                    if (yy >= 0 && yy < m.height && xx >= 0 && xx < m.width && m.at(yy, xx)) v = 1;
                }
            }
            out.at(y, x) = v;
        }
    }
    return out;
}

Mask mask_erode(const Mask& m, int radius) {
    Mask out(m.height, m.width);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            uint8_t v = 1;
            for (int dy = -radius; dy <= radius && v; ++dy) {
                for (int dx = -radius; dx <= radius && v; ++dx) {
                    int yy = y + dy, xx = x + dx;
                    if (yy < 0 || yy >= m.height || xx < 0 || xx >= m.width || !m.at(yy, xx)) v = 0;
                }
            }
            out.at(y, x) = v;
        }
    }
    return out;
}

size_t mask_intersection(const Mask& a, const Mask& b) {
    if (!a.same_shape(b)) throw ValidationError("mask shape mismatch in intersection");
    size_t n = 0;
    for (size_t i = 0; i < a.data.size(); ++i) n += (a.data[i] & b.data[i]);
    return n;
}

size_t mask_union(const Mask& a, const Mask& b) {
    if (!a.same_shape(b)) throw ValidationError("mask shape mismatch in union");
    size_t n = 0;
    for (size_t i = 0; i < a.data.size(); ++i) n += (a.data[i] | b.data[i]);
    return n;
}

void InstanceMaskSet::validate() const {
    std::vector<uint8_t> seen(static_cast<size_t>(height) * width, 0);
    for (size_t k = 0; k < instances.size(); ++k) {
        const Mask& m = instances[k];
        if (m.height != height || m.width != width) {
            throw ValidationError("instance " + std::to_string(k) + " shape mismatch");
        }
        size_t count = 0;
        for (size_t i = 0; i < m.data.size(); ++i) {
            if (!m.data[i]) continue;
            ++count;
            if (seen[i]) {
                throw ValidationError("instances overlap at pixel " + std::to_string(i));
            }
            seen[i] = 1;
        }
        if (count == 0) throw ValidationError("instance " + std::to_string(k) + " is empty");
    }
}

bool InstanceMaskSet::same_content(const InstanceMaskSet& o) const {
    if (height != o.height || width != o.width || instances.size() != o.instances.size())
        return false;
    for (size_t i = 0; i < instances.size(); ++i) {
        if (!(instances[i] == o.instances[i])) return false;
    }
    return true;
}

Mask InstanceMaskSet::foreground() const {
    Mask out(height, width);
    for (const Mask& m : instances) {
        for (size_t i = 0; i < out.data.size(); ++i) out.data[i] |= m.data[i];
    }
    return out;
}

InstanceMaskSet resolve_overlaps(int height, int width, std::vector<Mask> masks,
                                 const std::string& origin) {
    InstanceMaskSet out(height, width);
    std::vector<uint8_t> taken(static_cast<size_t>(height) * width, 0);
    for (size_t k = 0; k < masks.size(); ++k) {
        Mask& m = masks[k];
        if (m.height != height || m.width != width) {
            throw ValidationError(origin + ": mask " + std::to_string(k) + " shape " +
                                  std::to_string(m.height) + "x" + std::to_string(m.width) +
                                  " does not match image " + std::to_string(height) + "x" +
                                  std::to_string(width));
        }
        size_t lost = 0;
        for (size_t i = 0; i < m.data.size(); ++i) {
            if (!m.data[i]) continue;
            if (taken[i]) {
                m.data[i] = 0;
                ++lost;
            } else {
                taken[i] = 1;
            }
        }
        if (lost > 0) {
            warn(origin + ": instance " + std::to_string(k) + " lost " + std::to_string(lost) +
                 " overlapping pixel(s) to earlier instances");
        }
        if (m.none()) {
            warn(origin + ": instance " + std::to_string(k) + " empty after overlap resolution, dropped");
            continue;
        }
        out.instances.push_back(std::move(m));
    }
    out.validate();
    return out;
}

InstanceMaskSet masks_hflip(const InstanceMaskSet& s) {
    InstanceMaskSet out(s.height, s.width);
    for (const Mask& m : s.instances) out.instances.push_back(mask_hflip(m));
    return out;
}

InstanceMaskSet masks_vflip(const InstanceMaskSet& s) {
    InstanceMaskSet out(s.height, s.width);
    for (const Mask& m : s.instances) out.instances.push_back(mask_vflip(m));
    return out;
}

InstanceMaskSet masks_rot90(const InstanceMaskSet& s, int k) {
    const bool swap = ((k % 4) + 4) % 4 % 2 == 1;
    InstanceMaskSet out(swap ? s.width : s.height, swap ? s.height : s.width);
    for (const Mask& m : s.instances) out.instances.push_back(mask_rot90(m, k));
    return out;
}

InstanceMaskSet masks_resize_nearest(const InstanceMaskSet& s, int out_h, int out_w,
                                     const std::string& origin) {
    InstanceMaskSet out(out_h, out_w);
    for (size_t i = 0; i < s.instances.size(); ++i) {
        Mask m = mask_resize_nearest(s.instances[i], out_h, out_w);
        if (m.none()) {
            warn(origin + ": instance " + std::to_string(i) + " vanished at " +
                 std::to_string(out_h) + "x" + std::to_string(out_w) + ", dropped");
            continue;
        }
        out.instances.push_back(std::move(m));
    }
    return out;
}

LabeledSample fit_sample(const LabeledSample& s, int size) {
    LabeledSample out;
    out.id = s.id;
    out.domain = s.domain;
    out.image = fit_to(s.image, size, size);
    if (s.masks) {
        InstanceMaskSet masks(size, size);
        for (size_t i = 0; i < s.masks->instances.size(); ++i) {
            Mask m = mask_fit_to(s.masks->instances[i], size, size);
            if (m.none()) {
                warn("sample " + s.id + ": instance " + std::to_string(i) +
                     " fell outside the crop, dropped");
                continue;
            }
            masks.instances.push_back(std::move(m));
        }
        masks.validate();
        out.masks = std::move(masks);
    }
    return out;
}

}  // namespace nsaug
