#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nsaug/dsb_io.hpp"
#include "nsaug/png_io.hpp"
#include "nsaug/util.hpp"
#include "test_helpers.hpp"

using namespace nsaug;
using nsaug::testing::TempDir;
namespace fs = std::filesystem;

namespace {

void make_sample_dirs(const std::string& root, const std::string& id, const Image& image,
                      const std::vector<Mask>& masks) {
    fs::create_directories(fs::path(root) / id / "images");
    write_image_png((fs::path(root) / id / "images" / (id + ".png")).string(), image);
    if (!masks.empty()) {
        fs::create_directories(fs::path(root) / id / "masks");
        for (size_t i = 0; i < masks.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "m%02zu.png", i);
            write_mask_png((fs::path(root) / id / "masks" / name).string(), masks[i]);
        }
    }
}

Mask one_pixel(int h, int w, int y, int x) {
    Mask m(h, w);
    m.at(y, x) = 1;
    return m;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("load_sample reads image, id and sorted masks") {
    TempDir dir("dsb_load");
    Image img = Image::filled(4, 6, 0.2f, 0.4f, 0.6f);
    make_sample_dirs(dir.str(), "abc", img, {one_pixel(4, 6, 0, 0), one_pixel(4, 6, 3, 5)});

    LabeledSample s = load_sample(dir.sub("abc/images/abc.png"), dir.sub("abc/masks"));
    CHECK(s.id == "abc");
    CHECK(s.image.height == 4);
    CHECK(s.image.width == 6);
    REQUIRE(s.masks.has_value());
    CHECK(s.masks->instances.size() == 2);
    CHECK(s.masks->instances[0].at(0, 0) == 1);  // m00 sorts before m01
    CHECK(s.masks->instances[1].at(3, 5) == 1);
    CHECK_FALSE(s.domain.has_value());
}

TEST_CASE("overlapping ground-truth masks are resolved with a warning") {
    TempDir dir("dsb_overlap");
    Mask a(2, 2), b(2, 2);
    a.at(0, 0) = a.at(0, 1) = 1;
    b.at(0, 1) = b.at(1, 1) = 1;
    make_sample_dirs(dir.str(), "ov", Image::filled(2, 2, 0.f, 0.f, 0.f), {a, b});

    WarnCapture cap;
    LabeledSample s = load_sample(dir.sub("ov/images/ov.png"), dir.sub("ov/masks"));
    CHECK(cap.contains("overlapping"));
    CHECK_NOTHROW(s.masks->validate());
    CHECK(s.masks->instances[0].count() == 2);
    CHECK(s.masks->instances[1].count() == 1);
}

TEST_CASE("mask shape mismatch names the offending file") {
    TempDir dir("dsb_shape");
    make_sample_dirs(dir.str(), "bad", Image::filled(3, 3, 0.f, 0.f, 0.f),
                     {one_pixel(3, 3, 0, 0)});
    write_mask_png(dir.sub("bad/masks/zz.png"), one_pixel(2, 2, 0, 0));
    try {
        load_sample(dir.sub("bad/images/bad.png"), dir.sub("bad/masks"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("zz.png") != std::string::npos);
    }
}

TEST_CASE("load_corpus walks ids in sorted order and attaches domains") {
    TempDir dir("dsb_corpus");
    for (const char* id : {"b_second", "a_first", "c_third"}) {
        make_sample_dirs(dir.str(), id, Image::filled(2, 2, 0.5f, 0.5f, 0.5f),
                         {one_pixel(2, 2, 1, 1)});
    }
    write_domains_csv(dir.sub("domains.csv"),
                      {{"a_first", 0}, {"b_second", 2}, {"c_third", 1}});

    auto corpus = load_corpus(dir.str());
    REQUIRE(corpus.size() == 3);
    CHECK(corpus[0].id == "a_first");
    CHECK(corpus[1].id == "b_second");
    CHECK(corpus[2].id == "c_third");
    CHECK(*corpus[1].domain == 2);
    REQUIRE(corpus[0].masks.has_value());

    auto no_masks = load_corpus(dir.str(), false);
    CHECK_FALSE(no_masks[0].masks.has_value());
}

TEST_CASE("write_sample then load_sample round-trips") {
    TempDir dir("dsb_rt");
    LabeledSample s;
    s.id = "rt01";
    s.image = Image::filled(3, 3, 0.25f, 0.5f, 0.75f);
    InstanceMaskSet set(3, 3);
    set.instances = {one_pixel(3, 3, 0, 0), one_pixel(3, 3, 2, 2)};
    s.masks = set;
    write_sample(dir.str(), s);

    LabeledSample back = load_sample(dir.sub("rt01/images/rt01.png"), dir.sub("rt01/masks"));
    CHECK(back.id == "rt01");
    CHECK(back.masks->same_content(*s.masks));
    for (size_t i = 0; i < s.image.data.size(); ++i)
        CHECK(std::abs(back.image.data[i] - s.image.data[i]) <= 0.51f / 255.f);
}

TEST_CASE("domains csv round-trips") {
    TempDir dir("dsb_domains");
    write_domains_csv(dir.sub("d.csv"), {{"x", 3}, {"y", 0}});
    auto m = read_domains_csv(dir.sub("d.csv"));
    CHECK(m.size() == 2);
    CHECK(m.at("x") == 3);
    CHECK(m.at("y") == 0);
}

TEST_CASE("submission csv has the kaggle layout") {
    TempDir dir("dsb_sub");
    InstanceMaskSet set(2, 2);
    Mask m1(2, 2), m2(2, 2);
    m1.at(0, 0) = m1.at(1, 0) = 1;
    m2.at(0, 1) = 1;
    set.instances = {m1, m2};
    InstanceMaskSet single(1, 1);
    single.instances = {one_pixel(1, 1, 0, 0)};
    write_submission_csv(dir.sub("sub.csv"), {{"img_a", set}, {"img_b", single}});

    CHECK(slurp(dir.sub("sub.csv")) ==
          "ImageId,EncodedPixels\n"
          "img_a,1 2\n"
          "img_a,3 1\n"
          "img_b,1 1\n");
}
