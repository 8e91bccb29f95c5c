#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsaug/masks.hpp"
#include "nsaug/sample.hpp"

namespace nsaug {

// Loads one sample. `image_path` points at the image file; the sample id is
// the filename stem. If `masks_dir` is given, every PNG in it becomes one
// instance; overlapping pixels stay with the earlier instance (warning).
LabeledSample load_sample(const std::string& image_path,
                          const std::optional<std::string>& masks_dir = std::nullopt);

// Walks a corpus root laid out as <root>/<id>/images/<id>.png with optional
// <root>/<id>/masks/*.png, in sorted id order. Attaches domains from
// <root>/domains.csv when present.
std::vector<LabeledSample> load_corpus(const std::string& root, bool with_masks = true);

// Writes one sample in the same layout under <root>/<id>/...
void write_sample(const std::string& root, const LabeledSample& sample);

void write_domains_csv(const std::string& path,
                       const std::vector<std::pair<std::string, int>>& rows);
std::map<std::string, int> read_domains_csv(const std::string& path);

// Kaggle submission CSV: header "ImageId,EncodedPixels", one row per
// instance, RLE as in rle.hpp. Rows keep the given sample order.
void write_submission_csv(const std::string& path,
                          const std::vector<std::pair<std::string, InstanceMaskSet>>& predictions);

}  // namespace nsaug
