#pragma once

#include "nsaug/masks.hpp"

namespace nsaug {

/// Intersection over union of two equal-shape binary masks; 0 when both are
/// empty.
double iou(const Mask& a, const Mask& b);

/// Challenge-style instance segmentation score: predictions are matched
/// one-to-one to ground truth greedily by descending IoU at each threshold
/// tau in {0.50, 0.55, ..., 0.95}, a pair matching only when IoU > tau;
/// per-threshold precision is TP / (TP + FP + FN) and the score is the mean
/// over the ten thresholds. Two empty sets score 1.
double dsb_map(const InstanceMaskSet& pred, const InstanceMaskSet& gt);

}  // namespace nsaug
