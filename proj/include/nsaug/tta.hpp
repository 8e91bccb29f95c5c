#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsaug/sample.hpp"
#include "nsaug/util.hpp"

namespace nsaug {

/// What a segmentation model hands back for one image: disjoint instance
/// masks at the image's shape, one confidence in [0,1] per instance.
struct Prediction {
    InstanceMaskSet masks;
    std::vector<double> confidence;
};

using Predictor = std::function<Prediction(const Image&)>;

/// Transform set and aggregation parameters for test-time augmentation.
/// The identity transform is always run; the run order is: identity,
/// rotations as listed, hflip, vflip, scales as listed, then color-jitter
/// draws (photometric only, identity inverse) seeded from `seed`.
struct TtaConfig {
    std::vector<int> rotations;  // quarter turns, each in {1,2,3}
    bool hflip = false;
    bool vflip = false;
    std::vector<double> scales;  // resize factors, each positive and != 1
    int color_jitter_draws = 0;
    uint64_t seed = 0;
    /// Back-mapped instances from different runs merge into one cluster when
    /// their IoU against the cluster seed reaches this value.
    double merge_iou_threshold = 0.5;
    /// A pixel survives voting when it appears in at least vote_fraction of
    /// all runs; a cluster whose voted mask is empty is dropped, which is
    /// what suppresses instances seen under only a few transforms.
    double vote_fraction = 0.5;

    void validate() const;
    int num_runs() const;
};

/// Run the predictor over every configured transform of `image`, map each
/// predicted instance back through the transform's geometric inverse,
/// cluster across runs by IoU (greedy, highest-confidence seed first), vote
/// pixels per cluster, and resolve any remaining overlap by descending
/// cluster confidence. A malformed prediction raises an error naming the
/// offending transform.
InstanceMaskSet tta_predict(const Predictor& predictor, const Image& image,
                            const TtaConfig& config);

struct ScoreRow {
    std::string sample_id;
    double map = 0.0;
    int num_pred = 0;
    int num_gt = 0;
};

struct ScoreReport {
    std::vector<ScoreRow> rows;
    double mean_map = 0.0;
};

/// Score a predictor over a labeled corpus, with or without test-time
/// augmentation. Every sample must carry ground-truth masks; the ids of any
/// that do not are listed in the error.
ScoreReport score_corpus(const Predictor& predictor, const std::vector<LabeledSample>& samples,
                         const std::optional<TtaConfig>& tta);

/// CSV with header sample_id,map,num_pred,num_gt and one row per sample.
void write_score_csv(const std::string& path, const ScoreReport& report);

}  // namespace nsaug
