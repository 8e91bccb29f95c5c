#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nsaug/masks.hpp"
#include "nsaug/metrics.hpp"
#include "nsaug/predictor.hpp"
#include "nsaug/tta.hpp"
#include "nsaug/util.hpp"
#include "oracles.hpp"

using namespace nsaug;

namespace {

Image flat_image(int h, int w, float v) {
    Image img(h, w);
    for (auto& x : img.data) x = v;
    return img;
}

void paint_square(Image& img, int y0, int x0, int y1, int x1, float v) {
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = v;
}

Mask rect_mask(int h, int w, int y0, int x0, int y1, int x1) {
    Mask m(h, w);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) m.at(y, x) = 1;
    return m;
}

// Two bright squares on dark ground; the blob predictor finds exactly these.
Image two_blob_image() {
    Image img = flat_image(16, 16, 0.1f);
    paint_square(img, 2, 2, 5, 5, 0.82f);
    paint_square(img, 8, 9, 12, 13, 0.9f);
    return img;
}

bool subset_of(const Mask& inner, const Mask& outer) {
    return mask_intersection(inner, outer) == inner.count();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

std::filesystem::path fresh_dir(const std::string& tag) {
    std::filesystem::path p = std::filesystem::temp_directory_path() / ("nsaug_tta_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("tta config validation and run counting") {
    TtaConfig cfg;
    cfg.validate();
    CHECK(cfg.num_runs() == 1);

    cfg.rotations = {1, 2, 3};
    cfg.hflip = true;
    cfg.vflip = true;
    cfg.scales = {0.75, 1.25};
    cfg.color_jitter_draws = 2;
    cfg.validate();
    CHECK(cfg.num_runs() == 10);

    TtaConfig bad = cfg;
    bad.rotations = {4};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.scales = {-0.5};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.color_jitter_draws = -1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.merge_iou_threshold = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.vote_fraction = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad.vote_fraction = 1.0;
    bad.merge_iou_threshold = 0.5;
    bad.validate();
}

TEST_CASE("identity-only tta equals the plain prediction") {
    BlobParams bp;
    bp.threshold = 0.3;
    Predictor blob = make_blob_predictor(bp);
    Image img = two_blob_image();

    Prediction direct = blob(img);
    REQUIRE(direct.masks.instances.size() == 2);

    TtaConfig cfg;  // identity only
    InstanceMaskSet out = tta_predict(blob, img, cfg);
    CHECK(nsaug_test::same_as_sets(out, direct.masks));
}

TEST_CASE("tta over flips and rotations reproduces an equivariant predictor") {
    // The blob rule commutes with flips and quarter turns exactly: luminance
    // is pixelwise, the median ignores pixel order, and connectivity is
    // preserved. Every run therefore back-maps onto the same instances and
    // voting keeps them whole.
    BlobParams bp;
    bp.threshold = 0.3;
    Predictor blob = make_blob_predictor(bp);
    Image img = two_blob_image();
    Prediction direct = blob(img);

    TtaConfig cfg;
    cfg.rotations = {1, 2, 3};
    cfg.hflip = true;
    cfg.vflip = true;
    CHECK(cfg.num_runs() == 6);
    InstanceMaskSet out = tta_predict(blob, img, cfg);
    CHECK(nsaug_test::same_as_sets(out, direct.masks));
}

TEST_CASE("tta votes away instances seen under a single transform") {
    // The predictor always reports the centered square (symmetric under every
    // configured transform) and adds a spurious off-center instance only when
    // it sees the marker pixel, which sits at (0,0) only in the identity run.
    const int n = 9;
    Predictor tricky = [&](const Image& im) -> Prediction {
        Prediction p;
        p.masks = InstanceMaskSet(im.height, im.width);
        p.masks.instances.push_back(rect_mask(im.height, im.width, 3, 3, 6, 6));
        p.confidence.push_back(0.9);
        if (im.at(0, 0, 0) > 0.5f) {
            p.masks.instances.push_back(rect_mask(im.height, im.width, 1, 6, 2, 8));
            p.confidence.push_back(0.8);
        }
        return p;
    };

    Image img = flat_image(n, n, 0.1f);
    img.at(0, 0, 0) = 1.0f;

    TtaConfig cfg;
    cfg.rotations = {2};
    cfg.hflip = true;
    cfg.vflip = true;
    REQUIRE(cfg.num_runs() == 4);

    InstanceMaskSet out = tta_predict(tricky, img, cfg);
    REQUIRE(out.instances.size() == 1);
    CHECK(out.instances[0] == rect_mask(n, n, 3, 3, 6, 6));

    // Sanity: with the identity run alone the spurious instance survives.
    TtaConfig identity_only;
    InstanceMaskSet raw = tta_predict(tricky, img, identity_only);
    CHECK(raw.instances.size() == 2);
}

TEST_CASE("tta rescale runs stay within a one-pixel boundary band") {
    BlobParams bp;
    bp.threshold = 0.3;
    Predictor blob = make_blob_predictor(bp);
    Image img = two_blob_image();
    Prediction direct = blob(img);
    REQUIRE(direct.masks.instances.size() == 2);

    TtaConfig cfg;
    cfg.scales = {1.5};
    cfg.vote_fraction = 0.5;  // 2 runs: one vote keeps a pixel
    InstanceMaskSet out = tta_predict(blob, img, cfg);
    REQUIRE(out.instances.size() == 2);

    for (const Mask& got : out.instances) {
        // Pair with the direct instance it overlaps most.
        const Mask* best = nullptr;
        double best_iou = -1.0;
        for (const Mask& ref : direct.masks.instances) {
            const double v = iou(got, ref);
            if (v > best_iou) {
                best_iou = v;
                best = &ref;
            }
        }
        REQUIRE(best != nullptr);
        CHECK(best_iou > 0.5);
        CHECK(subset_of(got, mask_dilate(*best, 1)));
        CHECK(subset_of(mask_erode(*best, 1), got));
    }
}

TEST_CASE("tta names the transform behind a malformed prediction") {
    Predictor broken = [](const Image& im) -> Prediction {
        Prediction p;
        p.masks = InstanceMaskSet(im.height, im.width);
        p.masks.instances.push_back(rect_mask(im.height, im.width, 0, 0, 2, 2));
        // Wrong confidence on rotated (portrait) frames only.
        p.confidence.push_back(im.height > im.width ? 2.0 : 0.5);
        return p;
    };

    Image img = flat_image(12, 16, 0.2f);
    TtaConfig cfg;
    cfg.rotations = {1};

    bool threw = false;
    try {
        tta_predict(broken, img, cfg);
    } catch (const ValidationError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("rot90x1") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("tta output instances are disjoint even when clusters collide") {
    // Two runs produce back-mapped instances that overlap but fall short of
    // the merge threshold, so they form two clusters; the lower-confidence
    // cluster must cede the shared pixels. The predictor reports a fixed
    // left-side rectangle; the hflip run back-maps it to the right side with
    // two overlapping columns. A marker pixel visible only to the identity
    // run sets the confidences apart.
    Predictor sided = [](const Image& im) -> Prediction {
        Prediction p;
        p.masks = InstanceMaskSet(im.height, im.width);
        p.masks.instances.push_back(rect_mask(im.height, im.width, 0, 0, 10, 6));
        p.confidence.push_back(im.at(0, 0, 0) > 0.5f ? 0.9 : 0.6);
        return p;
    };
    Image img = flat_image(10, 10, 0.3f);
    img.at(0, 0, 0) = 1.0f;

    TtaConfig cfg;
    cfg.hflip = true;  // runs: identity, hflip
    InstanceMaskSet out = tta_predict(sided, img, cfg);
    out.validate();  // disjointness is part of the invariant
    REQUIRE(out.instances.size() == 2);
    // Identity (conf 0.9) keeps columns 0..5; the hflip cluster (conf 0.6)
    // loses the contested columns 4..5 and keeps 6..9.
    CHECK(out.instances[0] == rect_mask(10, 10, 0, 0, 10, 6));
    CHECK(out.instances[1] == rect_mask(10, 10, 0, 6, 10, 10));
}

TEST_CASE("score_corpus scores oracle and empty predictors at the extremes") {
    RandomStream rng(88);
    std::vector<LabeledSample> samples;
    for (int i = 0; i < 3; ++i) {
        LabeledSample s;
        s.image = two_blob_image();
        // Make each image unique so content lookup cannot alias.
        s.image.at(15, 15, 0) = 0.01f * static_cast<float>(i + 1);
        InstanceMaskSet ms(16, 16);
        ms.instances.push_back(rect_mask(16, 16, 2, 2, 5, 5));
        ms.instances.push_back(rect_mask(16, 16, 8, 9, 12, 13));
        s.masks = ms;
        s.id = "img" + std::to_string(i);
        samples.push_back(std::move(s));
    }

    ScoreReport perfect = score_corpus(make_oracle_predictor(samples), samples, std::nullopt);
    REQUIRE(perfect.rows.size() == 3);
    CHECK(perfect.mean_map == 1.0);
    for (const auto& r : perfect.rows) {
        CHECK(r.map == 1.0);
        CHECK(r.num_pred == 2);
        CHECK(r.num_gt == 2);
    }

    ScoreReport nothing = score_corpus(make_empty_predictor(), samples, std::nullopt);
    CHECK(nothing.mean_map == 0.0);
    for (const auto& r : nothing.rows) {
        CHECK(r.map == 0.0);
        CHECK(r.num_pred == 0);
    }

    SUBCASE("tta path agrees with the direct path for the oracle") {
        TtaConfig cfg;
        cfg.rotations = {2};
        // The oracle only recognizes the untransformed image, so only the
        // identity run fires; with vote_fraction at one half of two runs the
        // identity instances survive intact.
        ScoreReport via_tta = score_corpus(make_oracle_predictor(samples), samples, cfg);
        CHECK(via_tta.mean_map == 1.0);
    }
}

TEST_CASE("score_corpus validates its inputs") {
    CHECK_THROWS_AS(score_corpus(make_empty_predictor(), {}, std::nullopt), ValidationError);

    std::vector<LabeledSample> samples(2);
    samples[0].image = flat_image(8, 8, 0.5f);
    samples[0].id = "has_none";
    samples[1].image = flat_image(8, 8, 0.5f);
    samples[1].id = "also_none";
    try {
        score_corpus(make_empty_predictor(), samples, std::nullopt);
        CHECK(false);
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("has_none") != std::string::npos);
        CHECK(msg.find("also_none") != std::string::npos);
    }
}

TEST_CASE("write_score_csv emits the expected table") {
    ScoreReport rep;
    rep.rows = {{"a", 1.0, 2, 2}, {"b", 0.25, 1, 3}};
    rep.mean_map = 0.625;
    auto dir = fresh_dir("csv");
    const std::string path = (dir / "scores.csv").string();
    write_score_csv(path, rep);

    const std::string text = slurp(path);
    REQUIRE(text.rfind("sample_id,map,num_pred,num_gt\n", 0) == 0);
    // One header plus two rows.
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(text.find("a,") != std::string::npos);
    CHECK(text.find("b,") != std::string::npos);
    CHECK(text.find(",2,2") != std::string::npos);
    CHECK(text.find(",1,3") != std::string::npos);

    CHECK_THROWS_AS(write_score_csv((dir / "missing" / "x.csv").string(), rep), IoError);
}
