#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "nsaug/augment.hpp"
#include "nsaug/color.hpp"
#include "nsaug/gan/model.hpp"
#include "nsaug/image.hpp"
#include "nsaug/masks.hpp"
#include "nsaug/util.hpp"
#include "oracles.hpp"

using namespace nsaug;

namespace {

gan::NetConfig aug_config() {
    gan::NetConfig c;
    c.image_size = 8;
    c.content_channels = 4;
    c.attr_dim = 2;
    c.num_domains = 3;
    c.base_width = 4;
    c.disc_width = 4;
    c.batch_size = 2;
    c.seed = 7;
    return c;
}

Image random_image(RandomStream& rng, int h, int w) {
    Image img(h, w);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform());
    return img;
}

Mask rect_mask(int h, int w, int y0, int x0, int y1, int x1) {
    Mask m(h, w);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) m.at(y, x) = 1;
    return m;
}

LabeledSample sample_with_masks(RandomStream& rng, int h, int w) {
    LabeledSample s;
    s.image = random_image(rng, h, w);
    InstanceMaskSet ms(h, w);
    ms.instances.push_back(rect_mask(h, w, 0, 0, h / 2, w / 2));
    ms.instances.push_back(rect_mask(h, w, h / 2, w / 2, h, w));
    s.masks = ms;
    s.domain = 1;
    s.id = "aug_fixture";
    return s;
}

AugmentPolicy geometric_only(bool hf, bool vf, bool rot, bool sc) {
    AugmentPolicy p;
    p.style_prob = 0.0;
    p.hflip = hf;
    p.vflip = vf;
    p.rot90 = rot;
    p.scale = sc;
    p.color_jitter = false;
    return p;
}

}  // namespace

TEST_CASE("whole-set mask transforms match per-instance transforms") {
    RandomStream rng(31);
    LabeledSample s = sample_with_masks(rng, 8, 6);
    const InstanceMaskSet& ms = *s.masks;

    InstanceMaskSet hf = masks_hflip(ms);
    InstanceMaskSet vf = masks_vflip(ms);
    InstanceMaskSet r1 = masks_rot90(ms, 1);
    InstanceMaskSet r3 = masks_rot90(ms, 3);
    REQUIRE(hf.instances.size() == ms.instances.size());
    REQUIRE(vf.instances.size() == ms.instances.size());
    REQUIRE(r1.instances.size() == ms.instances.size());
    CHECK(r1.height == ms.width);
    CHECK(r1.width == ms.height);
    for (size_t i = 0; i < ms.instances.size(); ++i) {
        CHECK(hf.instances[i] == mask_hflip(ms.instances[i]));
        CHECK(vf.instances[i] == mask_vflip(ms.instances[i]));
        CHECK(r1.instances[i] == mask_rot90(ms.instances[i], 1));
        CHECK(r3.instances[i] == mask_rot90(ms.instances[i], 3));
        CHECK(hf.instances[i].count() == ms.instances[i].count());
        CHECK(r1.instances[i].count() == ms.instances[i].count());
    }
    // Four quarter turns come home.
    CHECK(masks_rot90(masks_rot90(r1, 1), 2).same_content(ms));
    hf.validate();
    r1.validate();
}

TEST_CASE("masks_resize_nearest drops vanished instances with a warning") {
    InstanceMaskSet ms(8, 8);
    Mask a = rect_mask(8, 8, 3, 3, 6, 6);  // covers the center sample points
    Mask b(8, 8);
    b.at(0, 0) = 1;  // a single corner pixel no 1x1 sample grid can hit
    ms.instances = {a, b};

    WarnCapture capture;
    InstanceMaskSet small = masks_resize_nearest(ms, 1, 1, "shrink_test");
    CHECK(small.instances.size() == 1);
    CHECK(capture.contains("shrink_test"));
    CHECK(capture.contains("vanished"));
    small.validate();
}

TEST_CASE("standard augmentation applies the same geometry to image and masks") {
    RandomStream seeder(99);
    LabeledSample s = sample_with_masks(seeder, 8, 8);

    SUBCASE("hflip only") {
        int flips = 0;
        for (uint64_t seed = 0; seed < 8; ++seed) {
            RandomStream rng(seed), probe(seed);
            const bool flip = probe.bernoulli(0.5);
            LabeledSample out = standard_augment(s, geometric_only(true, false, false, false), rng);
            if (flip) {
                ++flips;
                CHECK(out.image.data == hflip(s.image).data);
                CHECK(out.masks->same_content(masks_hflip(*s.masks)));
            } else {
                CHECK(out.image.data == s.image.data);
                CHECK(out.masks->same_content(*s.masks));
            }
        }
        CHECK(flips > 0);
        CHECK(flips < 8);
    }

    SUBCASE("rotation only") {
        bool saw_turn = false;
        for (uint64_t seed = 0; seed < 8; ++seed) {
            RandomStream rng(seed), probe(seed);
            const int turns = probe.uniform_int(0, 3);
            LabeledSample out = standard_augment(s, geometric_only(false, false, true, false), rng);
            if (turns != 0) saw_turn = true;
            CHECK(out.image.data == (turns == 0 ? s.image : rot90(s.image, turns)).data);
            CHECK(out.masks->same_content(turns == 0 ? *s.masks : masks_rot90(*s.masks, turns)));
        }
        CHECK(saw_turn);
    }

    SUBCASE("scale only") {
        RandomStream rng(3), probe(3);
        const float f = static_cast<float>(probe.uniform(0.8, 1.2));
        const int nh = std::max(1, static_cast<int>(std::lround(8 * f)));
        const int nw = nh;
        LabeledSample out = standard_augment(s, geometric_only(false, false, false, true), rng);
        CHECK(out.image.height == nh);
        CHECK(out.image.width == nw);
        CHECK(out.masks->height == nh);
        CHECK(out.masks->width == nw);
        out.validate();
    }

    SUBCASE("color jitter only touches the image") {
        AugmentPolicy p = geometric_only(false, false, false, false);
        p.color_jitter = true;
        RandomStream rng(12), probe(12);
        const float fb = static_cast<float>(probe.uniform(0.8, 1.2));
        const float fc = static_cast<float>(probe.uniform(0.8, 1.2));
        const float fs = static_cast<float>(probe.uniform(0.8, 1.2));
        const float dh = static_cast<float>(probe.uniform(-0.05, 0.05));
        LabeledSample out = standard_augment(s, p, rng);
        CHECK(out.image.data == color_jitter(s.image, fb, fc, fs, dh).data);
        CHECK(out.masks->same_content(*s.masks));
    }
}

TEST_CASE("standard augmentation is deterministic in the stream seed") {
    RandomStream seeder(5);
    LabeledSample s = sample_with_masks(seeder, 10, 10);
    AugmentPolicy p;
    p.style_prob = 0.0;
    RandomStream r1(777), r2(777), r3(778);
    LabeledSample a = standard_augment(s, p, r1);
    LabeledSample b = standard_augment(s, p, r2);
    LabeledSample c = standard_augment(s, p, r3);
    CHECK(a.image.data == b.image.data);
    CHECK(a.masks->same_content(*b.masks));
    // A different seed should change at least something across a few tries.
    const bool differs = !(a.image.height == c.image.height && a.image.width == c.image.width &&
                           a.image.data == c.image.data);
    CHECK(differs);
}

TEST_CASE("color_jitter identity factors leave the image nearly unchanged") {
    RandomStream rng(21);
    Image img = random_image(rng, 6, 6);
    Image out = color_jitter(img, 1.0f, 1.0f, 1.0f, 0.0f);
    REQUIRE(out.data.size() == img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(img.data[i]).epsilon(1e-5));

    Image bright = color_jitter(img, 1.2f, 1.0f, 1.0f, 0.0f);
    double mean_in = 0, mean_out = 0;
    for (float v : img.data) mean_in += v;
    for (float v : bright.data) mean_out += v;
    CHECK(mean_out > mean_in);
    for (float v : bright.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("style augmentation keeps masks byte-identical") {
    gan::NetConfig cfg = aug_config();
    gan::GanModel<float> model(cfg);
    model.step = 1;
    RandomStream seeder(61);

    SUBCASE("input already at model size") {
        LabeledSample s = sample_with_masks(seeder, 8, 8);
        RandomStream rng(100);
        StyleAugmentResult res = style_augment(model, s, rng);
        REQUIRE(res.sample.masks.has_value());
        CHECK(res.sample.masks->same_content(*s.masks));
        CHECK(res.sample.image.height == 8);
        CHECK(res.sample.image.width == 8);
        CHECK(res.sample.id == s.id);
        CHECK(res.domain_drawn >= 0);
        CHECK(res.domain_drawn < cfg.num_domains);
        CHECK(res.sample.domain == res.domain_drawn);
        res.sample.validate();
    }

    SUBCASE("larger input is fitted first, masks match the fitted sample") {
        LabeledSample s = sample_with_masks(seeder, 12, 10);
        LabeledSample fitted = fit_sample(s, 8);
        RandomStream rng(100);
        StyleAugmentResult res = style_augment(model, s, rng);
        REQUIRE(res.sample.masks.has_value());
        CHECK(res.sample.masks->same_content(*fitted.masks));
    }
}

TEST_CASE("style augmentation validates its inputs") {
    gan::NetConfig cfg = aug_config();
    gan::GanModel<float> model(cfg);
    RandomStream seeder(62);
    LabeledSample s = sample_with_masks(seeder, 8, 8);

    RandomStream rng(1);
    CHECK_THROWS_AS(style_augment(model, s, rng), ValidationError);  // no training steps

    model.step = 1;
    LabeledSample unlabeled = s;
    unlabeled.domain.reset();
    CHECK_THROWS_AS(style_augment(model, unlabeled, rng, true), ValidationError);

    LabeledSample bad = s;
    bad.domain = 9;
    CHECK_THROWS_AS(style_augment(model, bad, rng, true), ValidationError);
}

TEST_CASE("style augmentation can exclude the source domain") {
    gan::NetConfig cfg = aug_config();
    gan::GanModel<float> model(cfg);
    model.step = 1;
    RandomStream seeder(63);
    LabeledSample s = sample_with_masks(seeder, 8, 8);
    s.domain = 1;

    std::vector<int> seen(cfg.num_domains, 0);
    for (uint64_t t = 0; t < 60; ++t) {
        RandomStream rng(mix_seed(900, t));
        StyleAugmentResult res = style_augment(model, s, rng, true);
        REQUIRE(res.domain_drawn != 1);
        ++seen[static_cast<size_t>(res.domain_drawn)];
    }
    CHECK(seen[0] > 0);
    CHECK(seen[2] > 0);
}

TEST_CASE("apply_policy draws the style coin and target domain fairly") {
    gan::NetConfig cfg = aug_config();
    gan::GanModel<float> model(cfg);
    model.step = 1;

    RandomStream seeder(64);
    std::vector<LabeledSample> batch;
    const int n = 10000;
    batch.reserve(n);
    LabeledSample proto = sample_with_masks(seeder, 8, 8);
    for (int i = 0; i < n; ++i) {
        LabeledSample s = proto;
        s.id = "s" + std::to_string(i);
        batch.push_back(std::move(s));
    }

    AugmentPolicy p;
    p.style_prob = 0.5;
    p.hflip = p.vflip = p.rot90 = p.scale = p.color_jitter = false;
    p.seed = 123;

    std::vector<PolicyOutput> out = apply_policy(&model, batch, p);
    REQUIRE(out.size() == static_cast<size_t>(n));

    int styled = 0;
    std::vector<int> domain_count(cfg.num_domains, 0);
    for (int i = 0; i < n; ++i) {
        CHECK(out[static_cast<size_t>(i)].seed == static_cast<uint64_t>(i));
        if (out[static_cast<size_t>(i)].styled) {
            ++styled;
            const int d = out[static_cast<size_t>(i)].domain_drawn;
            REQUIRE(d >= 0);
            REQUIRE(d < cfg.num_domains);
            ++domain_count[static_cast<size_t>(d)];
        } else {
            CHECK(out[static_cast<size_t>(i)].domain_drawn == -1);
        }
    }

    // Coin fraction within 4 sigma of one half.
    const double frac = static_cast<double>(styled) / n;
    CHECK(frac >= 0.48);
    CHECK(frac <= 0.52);

    // Drawn domains uniform within 3 sigma.
    const double k = static_cast<double>(cfg.num_domains);
    const double expect = styled / k;
    const double sigma = std::sqrt(styled * (1.0 / k) * (1.0 - 1.0 / k));
    for (int d = 0; d < cfg.num_domains; ++d) {
        CHECK(std::abs(domain_count[static_cast<size_t>(d)] - expect) <= 3.0 * sigma);
    }
}

TEST_CASE("apply_policy is deterministic and checks the model requirement") {
    gan::NetConfig cfg = aug_config();
    gan::GanModel<float> model(cfg);
    model.step = 1;
    RandomStream seeder(65);
    std::vector<LabeledSample> batch = {sample_with_masks(seeder, 8, 8),
                                        sample_with_masks(seeder, 8, 8)};
    batch[1].id = "second";

    AugmentPolicy p;
    p.style_prob = 1.0;
    p.seed = 42;
    std::vector<PolicyOutput> a = apply_policy(&model, batch, p);
    std::vector<PolicyOutput> b = apply_policy(&model, batch, p);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].styled == b[i].styled);
        CHECK(a[i].domain_drawn == b[i].domain_drawn);
        CHECK(a[i].sample.image.data == b[i].sample.image.data);
    }

    CHECK_THROWS_AS(apply_policy(nullptr, batch, p), ValidationError);
    p.style_prob = 0.0;
    std::vector<PolicyOutput> plain = apply_policy(nullptr, batch, p);
    CHECK(plain.size() == 2);
    for (const auto& item : plain) CHECK_FALSE(item.styled);

    AugmentPolicy bad;
    bad.style_prob = 1.5;
    CHECK_THROWS_AS(apply_policy(&model, batch, bad), ValidationError);
}
