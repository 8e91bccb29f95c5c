#pragma once

#include <cstdint>
#include <vector>

#include "nsaug/features.hpp"

namespace nsaug {

struct ClusterModel {
    int k = 0;
    std::vector<std::vector<double>> centroids;
    uint64_t seed = 0;
    double inertia = 0.0;
};

struct KmeansParams {
    int restarts = 10;
    int max_iters = 300;
};

// Lloyd's algorithm from k-means++ seeding; the best of `restarts` runs by
// inertia wins. Converges when assignments stop changing. Requires at least
// k distinct feature vectors. Deterministic given the seed.
ClusterModel fit_kmeans(const std::vector<HsvFeature>& features, int k, uint64_t seed,
                        const KmeansParams& params = {});

// Index of the nearest centroid (Euclidean); ties go to the lowest index.
int assign(const ClusterModel& model, const HsvFeature& feature);

std::vector<int> assign_all(const ClusterModel& model, const std::vector<HsvFeature>& features);

}  // namespace nsaug
