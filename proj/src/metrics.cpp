#include "nsaug/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "nsaug/util.hpp"

namespace nsaug {

namespace {

void mask_overlap(const Mask& a, const Mask& b, uint64_t& inter, uint64_t& uni) {
    inter = uni = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const bool pa = a.data[i] != 0, pb = b.data[i] != 0;
        inter += pa && pb;
        uni += pa || pb;
    }
}

}  // namespace

double iou(const Mask& a, const Mask& b) {
    if (!a.same_shape(b)) throw ValidationError("iou: mask shapes differ");
    uint64_t inter, uni;
    mask_overlap(a, b, inter, uni);
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double dsb_map(const InstanceMaskSet& pred, const InstanceMaskSet& gt) {
    if (pred.height != gt.height || pred.width != gt.width)
        throw ValidationError("dsb_map: set shapes differ");
    const size_t np = pred.instances.size(), ng = gt.instances.size();
    if (np == 0 && ng == 0) return 1.0;
    if (np == 0 || ng == 0) return 0.0;

    // Candidate pairs with exact pixel counts, sorted by IoU descending
    // (ties broken by index so the greedy pass is deterministic). The
    // threshold comparison is done in integers: inter/uni > (50+5t)/100.
    struct Pair {
        uint64_t inter, uni;
        size_t p, g;
    };
    std::vector<Pair> pairs;
    for (size_t p = 0; p < np; ++p)
        for (size_t g = 0; g < ng; ++g) {
            uint64_t inter, uni;
            mask_overlap(pred.instances[p], gt.instances[g], inter, uni);
            if (inter > 0) pairs.push_back({inter, uni, p, g});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        // a.inter/a.uni vs b.inter/b.uni without division
        const auto lhs = a.inter * b.uni, rhs = b.inter * a.uni;
        if (lhs != rhs) return lhs > rhs;
        if (a.p != b.p) return a.p < b.p;
        return a.g < b.g;
    });

    double total = 0.0;
    for (int t = 0; t < 10; ++t) {
        const uint64_t tau_num = 50 + 5 * static_cast<uint64_t>(t);
        std::vector<char> used_p(np, 0), used_g(ng, 0);
        size_t tp = 0;
        for (const Pair& pr : pairs) {
            if (pr.inter * 100 <= tau_num * pr.uni) continue;
            if (used_p[pr.p] || used_g[pr.g]) continue;
            used_p[pr.p] = used_g[pr.g] = 1;
            ++tp;
        }
        total += static_cast<double>(tp) / static_cast<double>(np + ng - tp);
    }
    return total / 10.0;
}

}  // namespace nsaug
