#include "nsaug/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "nsaug/util.hpp"

namespace nsaug {

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

int nearest(const std::vector<std::vector<double>>& centroids, const std::vector<double>& f) {
    int best = 0;
    double best_d = dist2(centroids[0], f);
    for (size_t c = 1; c < centroids.size(); ++c) {
        double d = dist2(centroids[c], f);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

std::vector<std::vector<double>> kmeanspp_init(const std::vector<HsvFeature>& features, int k,
                                               RandomStream& rng) {
    std::vector<std::vector<double>> centroids;
    centroids.push_back(features[rng.uniform_int(0, static_cast<int>(features.size()) - 1)]);
    std::vector<double> d2(features.size());
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (size_t i = 0; i < features.size(); ++i) {
            double d = dist2(centroids[0], features[i]);
            for (size_t c = 1; c < centroids.size(); ++c)
                d = std::min(d, dist2(centroids[c], features[i]));
            d2[i] = d;
            total += d;
        }
        size_t pick = 0;
        if (total > 0.0) {
            double r = rng.uniform() * total;
            double cum = 0.0;
            for (size_t i = 0; i < features.size(); ++i) {
                cum += d2[i];
                if (r < cum) {
                    pick = i;
                    break;
                }
                pick = i;
            }
        } else {
            pick = static_cast<size_t>(rng.uniform_int(0, static_cast<int>(features.size()) - 1));
        }
        centroids.push_back(features[pick]);
    }
    return centroids;
}

struct LloydResult {
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
};

LloydResult lloyd(const std::vector<HsvFeature>& features, int k, RandomStream& rng,
                  int max_iters) {
    const size_t n = features.size();
    std::vector<std::vector<double>> centroids = kmeanspp_init(features, k, rng);
    std::vector<int> labels(n, -1);
    double prev_inertia = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        double inertia = 0.0;
        for (size_t i = 0; i < n; ++i) {
            int c = nearest(centroids, features[i]);
            inertia += dist2(centroids[c], features[i]);
            if (c != labels[i]) {
                labels[i] = c;
                changed = true;
            }
        }
        if (inertia > prev_inertia * (1.0 + 1e-9) + 1e-12)
            throw NumericalError("k-means inertia increased");
        prev_inertia = inertia;
        if (!changed) break;

        std::vector<std::vector<double>> next(k, std::vector<double>(features[0].size(), 0.0));
        std::vector<int> counts(k, 0);
        for (size_t i = 0; i < n; ++i) {
            for (size_t d = 0; d < features[i].size(); ++d) next[labels[i]][d] += features[i][d];
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // revive an empty cluster with the point farthest from its centroid
                size_t far_i = 0;
                double far_d = -1.0;
                for (size_t i = 0; i < n; ++i) {
                    double d = dist2(centroids[labels[i]], features[i]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                next[c] = features[far_i];
                // inertia bookkeeping restarts; the monotonicity guard resets
                prev_inertia = std::numeric_limits<double>::infinity();
            } else {
                for (double& v : next[c]) v /= counts[c];
            }
        }
        centroids = std::move(next);
    }

    LloydResult res;
    res.centroids = std::move(centroids);
    res.inertia = 0.0;
    for (size_t i = 0; i < n; ++i)
        res.inertia += dist2(res.centroids[nearest(res.centroids, features[i])], features[i]);
    return res;
}

}  // namespace

ClusterModel fit_kmeans(const std::vector<HsvFeature>& features, int k, uint64_t seed,
                        const KmeansParams& params) {
    if (k < 1) throw ValidationError("k-means: k must be >= 1");
    if (features.empty()) throw ValidationError("k-means: no features");
    for (const auto& f : features)
        if (f.size() != features[0].size()) throw ValidationError("k-means: ragged features");

    std::set<std::vector<double>> distinct(features.begin(), features.end());
    if (static_cast<int>(distinct.size()) < k)
        throw ValidationError("k-means: need at least k distinct feature vectors");

    ClusterModel best;
    best.k = k;
    best.seed = seed;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < params.restarts; ++r) {
        RandomStream rng(mix_seed(seed, static_cast<uint64_t>(r)));
        LloydResult res = lloyd(features, k, rng, params.max_iters);
        if (res.inertia < best.inertia) {
            best.inertia = res.inertia;
            best.centroids = std::move(res.centroids);
        }
    }
    return best;
}

int assign(const ClusterModel& model, const HsvFeature& feature) {
    if (model.centroids.empty()) throw ValidationError("assign: empty model");
    if (feature.size() != model.centroids[0].size())
        throw ValidationError("assign: feature dimension mismatch");
    return nearest(model.centroids, feature);
}

std::vector<int> assign_all(const ClusterModel& model, const std::vector<HsvFeature>& features) {
    std::vector<int> out(features.size());
    for (size_t i = 0; i < features.size(); ++i) out[i] = assign(model, features[i]);
    return out;
}

}  // namespace nsaug
