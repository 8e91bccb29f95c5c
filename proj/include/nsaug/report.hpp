#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nsaug/gan/model.hpp"
#include "nsaug/sample.hpp"

namespace nsaug {

/// Fixed palette for category markers; labels cycle past its end.
std::array<float, 3> label_color(int label);

/// Tiles `cells` left to right, top to bottom into `cols` columns on a light
/// background. Every cell is resized to cell_size x cell_size; trailing empty
/// slots stay background. cols and cell_size must be positive, cells
/// non-empty.
Image make_grid(const std::vector<Image>& cells, int cols, int cell_size, int pad = 2);

/// Scatter of 2-D points as 3x3 colored markers on white. The view spans the
/// data bounding box plus a margin; a degenerate axis gets a unit span. One
/// label per point picks the marker color.
Image scatter_plot(const std::vector<std::array<double, 2>>& points,
                   const std::vector<int>& labels, int size = 512);

/// Style-transfer contact sheet: one row per source sample, first column the
/// source itself, then one column per target domain. The cell where the
/// target equals the source's own domain decodes the encoded attribute (a
/// self-reconstruction); every other cell decodes an attribute drawn from
/// `seed`. Sources need in-range domain labels; the model needs at least one
/// training step.
Image style_transfer_grid(gan::GanModel<float>& model, const std::vector<LabeledSample>& sources,
                          uint64_t seed);

/// First sample of each label value in [0, k), in label order; labels with no
/// samples are skipped. assignments.size() must equal samples.size().
std::vector<size_t> pick_exemplars(const std::vector<LabeledSample>& samples,
                                   const std::vector<int>& assignments, int k);

}  // namespace nsaug
