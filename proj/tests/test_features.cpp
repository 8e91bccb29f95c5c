#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nsaug/features.hpp"
#include "nsaug/util.hpp"

using namespace nsaug;

TEST_CASE("feature layout and normalization") {
    Image img(16, 16);
    RandomStream rng(61);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform());
    HsvFeature f = extract_features(img);
    REQUIRE(f.size() == 48);
    CHECK_NOTHROW(validate_feature(f, 16));
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (int b = 0; b < 16; ++b) sum += f[c * 16 + b];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("uniform mid-gray puts all saturation mass in bin 0") {
    Image img = Image::filled(12, 12, 0.5f, 0.5f, 0.5f);
    HsvFeature f = extract_features(img);
    CHECK(f[16] == doctest::Approx(1.0));  // S block starts at 16
    CHECK(f[0] == doctest::Approx(1.0));   // gray hue is 0 by convention
    CHECK(f[32 + 8] == doctest::Approx(1.0));  // V=0.5 lands in bin 8
}

TEST_CASE("features are permutation invariant") {
    Image img(10, 10);
    RandomStream rng(67);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform());
    HsvFeature before = extract_features(img);

    // swap pixels with a deterministic shuffle
    Image shuffled = img;
    std::vector<int> perm(100);
    for (int i = 0; i < 100; ++i) perm[i] = i;
    for (int i = 99; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
    for (int i = 0; i < 100; ++i)
        for (int c = 0; c < 3; ++c)
            shuffled.at(perm[i] / 10, perm[i] % 10, c) = img.at(i / 10, i % 10, c);

    HsvFeature after = extract_features(shuffled);
    REQUIRE(before.size() == after.size());
    for (size_t i = 0; i < before.size(); ++i)
        CHECK(before[i] == doctest::Approx(after[i]).epsilon(1e-12));
}

TEST_CASE("bin count is configurable") {
    FeatureParams params;
    params.bins_per_channel = 8;
    Image img = Image::filled(4, 4, 0.9f, 0.1f, 0.1f);
    HsvFeature f = extract_features(img, params);
    CHECK(f.size() == 24);
    CHECK_NOTHROW(validate_feature(f, 8));
    params.bins_per_channel = 1;
    CHECK_THROWS_AS(extract_features(img, params), ValidationError);
}
