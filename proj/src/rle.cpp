#include "nsaug/rle.hpp"

#include <sstream>

namespace nsaug {

std::string rle_encode(const Mask& mask) {
    if (mask.none()) throw ValidationError("cannot RLE-encode an empty mask");
    std::ostringstream out;
    bool first = true;
    int64_t run_start = -1;
    int64_t run_len = 0;
    const int64_t total = static_cast<int64_t>(mask.height) * mask.width;
    for (int64_t p = 0; p <= total; ++p) {
        // column-major scan: position p covers (row = p % H, col = p / H)
        bool set = false;
        if (p < total) {
            int col = static_cast<int>(p / mask.height);
            int row = static_cast<int>(p % mask.height);
            set = mask.at(row, col) != 0;
        }
        if (set) {
            if (run_len == 0) run_start = p + 1;  // 1-indexed
            ++run_len;
        } else if (run_len > 0) {
            if (!first) out << ' ';
            out << run_start << ' ' << run_len;
            first = false;
            run_len = 0;
        }
    }
    return out.str();
}

Mask rle_decode(const std::string& rle, int height, int width) {
    if (height <= 0 || width <= 0) throw ValidationError("rle_decode: empty shape");
    std::istringstream in(rle);
    std::vector<int64_t> numbers;
    int64_t v;
    while (in >> v) numbers.push_back(v);
    if (!in.eof()) throw ValidationError("rle_decode: non-numeric token in \"" + rle + "\"");
    if (numbers.empty()) throw ValidationError("rle_decode: empty encoding");
    if (numbers.size() % 2 != 0) throw ValidationError("rle_decode: odd number of tokens");

    const int64_t total = static_cast<int64_t>(height) * width;
    Mask mask(height, width);
    int64_t prev_end = 0;
    for (size_t i = 0; i < numbers.size(); i += 2) {
        int64_t start = numbers[i];
        int64_t len = numbers[i + 1];
        if (start < 1 || len < 1) throw ValidationError("rle_decode: non-positive start or length");
        if (start <= prev_end) {
            throw ValidationError("rle_decode: overlapping or non-ascending run at position " +
                                  std::to_string(start));
        }
        if (start + len - 1 > total) {
            throw ValidationError("rle_decode: run " + std::to_string(start) + "+" +
                                  std::to_string(len) + " exceeds " + std::to_string(total) +
                                  " pixels");
        }
        for (int64_t p = start - 1; p < start - 1 + len; ++p) {
            int col = static_cast<int>(p / height);
            int row = static_cast<int>(p % height);
            mask.at(row, col) = 1;
        }
        prev_end = start + len - 1;
    }
    return mask;
}

}  // namespace nsaug
