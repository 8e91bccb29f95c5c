#pragma once

#include <string>
#include <vector>

#include "nsaug/sample.hpp"
#include "nsaug/tta.hpp"

namespace nsaug {

/// Threshold segmenter over the salience map |luminance - median|: pixels
/// above the threshold form foreground, 8-connected components become
/// instances, components smaller than min_size pixels are discarded. The
/// salience map is deliberately not normalized per image, so the usable
/// threshold depends on the style mix it was fitted on.
struct BlobParams {
    double threshold = 0.2;
    int min_size = 3;

    void validate() const;
};

Predictor make_blob_predictor(const BlobParams& params);

/// Grid search over thresholds {0.02, 0.04, ..., 0.60}, maximizing the mean
/// instance score over `samples` (all of which need ground truth); ties go
/// to the smaller threshold.
BlobParams fit_blob_threshold(const std::vector<LabeledSample>& samples, int min_size = 3);

/// Returns each query's ground-truth masks, matched by exact pixel content;
/// an image not in the corpus gets an empty prediction.
Predictor make_oracle_predictor(std::vector<LabeledSample> corpus);

/// Predicts nothing, always.
Predictor make_empty_predictor();

/// Wraps a long-running child process: the command is started once through
/// the shell; for every query the image is written as a PNG under
/// scratch_dir and its path sent as one line to the child's stdin; the child
/// answers with one line naming a directory whose PNG files are the
/// predicted instance masks (confidence 1 each). The child must flush its
/// stdout after each line.
Predictor make_external_predictor(const std::string& command, const std::string& scratch_dir);

}  // namespace nsaug
