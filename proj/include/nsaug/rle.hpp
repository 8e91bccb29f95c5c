#pragma once

#include <string>

#include "nsaug/masks.hpp"

namespace nsaug {

// Competition run-length format: pixels are numbered 1..H*W scanning down
// columns (column-major), runs are "start length" pairs with ascending
// starts, space separated. Encoding an empty mask is an error (the scoring
// server rejects empty instances).
std::string rle_encode(const Mask& mask);

// Exact inverse of rle_encode. Malformed input, overlapping runs, or runs
// outside 1..H*W raise ValidationError.
Mask rle_decode(const std::string& rle, int height, int width);

}  // namespace nsaug
