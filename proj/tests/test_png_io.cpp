#include <png.h>

#include <cstdio>
#include <vector>

#include "doctest.h"
#include "nsaug/png_io.hpp"
#include "nsaug/util.hpp"
#include "test_helpers.hpp"

using namespace nsaug;
using nsaug::testing::TempDir;

namespace {

// Writes an arbitrary PNG so reader paths (16-bit, palette, alpha) can be
// exercised without shipping binary fixtures. Rows are raw bytes in PNG
// network order.
void write_png_raw(const std::string& path, int width, int height, int bit_depth,
                   int color_type, const std::vector<std::vector<png_byte>>& rows,
                   const std::vector<png_color>& palette = {}) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    REQUIRE(fp != nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    REQUIRE(setjmp(png_jmpbuf(png)) == 0);
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    if (!palette.empty())
        png_set_PLTE(png, info, const_cast<png_color*>(palette.data()),
                     static_cast<int>(palette.size()));
    png_write_info(png, info);
    for (const auto& row : rows) png_write_row(png, const_cast<png_byte*>(row.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

TEST_CASE("8-bit RGB round trip is exact on the 255 grid") {
    TempDir dir("png_rgb");
    Image img(3, 5);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(y, x, c) = static_cast<float>((y * 5 + x + c * 37) % 256) / 255.f;
    write_image_png(dir.sub("a.png"), img);
    Image back = read_image_png(dir.sub("a.png"));
    REQUIRE(back.height == 3);
    REQUIRE(back.width == 5);
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(1e-6));
}

TEST_CASE("writing quantizes off-grid values to the nearest step") {
    TempDir dir("png_q");
    Image img = Image::filled(1, 1, 0.5f, 0.f, 1.f);
    write_image_png(dir.sub("q.png"), img);
    Image back = read_image_png(dir.sub("q.png"));
    CHECK(back.at(0, 0, 0) == doctest::Approx(128.f / 255.f));
    CHECK(back.at(0, 0, 1) == 0.f);
    CHECK(back.at(0, 0, 2) == 1.f);
}

TEST_CASE("png output bytes are deterministic") {
    TempDir dir("png_det");
    Image img(4, 4);
    RandomStream rng(5);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform());
    write_image_png(dir.sub("a.png"), img);
    write_image_png(dir.sub("b.png"), img);
    CHECK(hash_file(dir.sub("a.png")) == hash_file(dir.sub("b.png")));
}

TEST_CASE("16-bit grayscale reads with full precision") {
    TempDir dir("png_16");
    // big-endian sample values 0, 16384, 32768, 65535
    std::vector<std::vector<png_byte>> rows = {
        {0x00, 0x00, 0x40, 0x00},
        {0x80, 0x00, 0xff, 0xff},
    };
    write_png_raw(dir.sub("g16.png"), 2, 2, 16, PNG_COLOR_TYPE_GRAY, rows);
    Image img = read_image_png(dir.sub("g16.png"));
    CHECK(img.at(0, 0, 0) == doctest::Approx(0.f));
    CHECK(img.at(0, 1, 0) == doctest::Approx(16384.f / 65535.f));
    // 0x8000 misread in the wrong byte order would come out near 0.002
    CHECK(img.at(1, 0, 0) == doctest::Approx(32768.f / 65535.f));
    CHECK(img.at(1, 1, 0) == doctest::Approx(1.f));
    CHECK(img.at(1, 0, 1) == img.at(1, 0, 0));  // gray replicated across channels
}

TEST_CASE("palette images expand to rgb") {
    TempDir dir("png_pal");
    std::vector<png_color> palette = {{255, 0, 0}, {0, 0, 255}};
    std::vector<std::vector<png_byte>> rows = {{0, 1}, {1, 0}};
    write_png_raw(dir.sub("pal.png"), 2, 2, 8, PNG_COLOR_TYPE_PALETTE, rows, palette);
    Image img = read_image_png(dir.sub("pal.png"));
    CHECK(img.at(0, 0, 0) == doctest::Approx(1.f));
    CHECK(img.at(0, 0, 2) == doctest::Approx(0.f));
    CHECK(img.at(0, 1, 2) == doctest::Approx(1.f));
    CHECK(img.at(1, 0, 0) == doctest::Approx(0.f));
}

TEST_CASE("alpha channels are dropped") {
    TempDir dir("png_rgba");
    std::vector<std::vector<png_byte>> rows = {
        {10, 20, 30, 0, 200, 100, 50, 255},
    };
    write_png_raw(dir.sub("rgba.png"), 2, 1, 8, PNG_COLOR_TYPE_RGB_ALPHA, rows);
    Image img = read_image_png(dir.sub("rgba.png"));
    CHECK(img.at(0, 0, 0) == doctest::Approx(10.f / 255.f));
    CHECK(img.at(0, 0, 1) == doctest::Approx(20.f / 255.f));
    CHECK(img.at(0, 1, 0) == doctest::Approx(200.f / 255.f));
}

TEST_CASE("low bit depth grayscale expands") {
    TempDir dir("png_gray1");
    // 1-bit: pixels 1,0,1,0 packed into the top bits of one byte
    std::vector<std::vector<png_byte>> rows = {{0xa0}};
    write_png_raw(dir.sub("g1.png"), 4, 1, 1, PNG_COLOR_TYPE_GRAY, rows);
    Image img = read_image_png(dir.sub("g1.png"));
    CHECK(img.at(0, 0, 0) == doctest::Approx(1.f));
    CHECK(img.at(0, 1, 0) == doctest::Approx(0.f));
    CHECK(img.at(0, 2, 0) == doctest::Approx(1.f));
}

TEST_CASE("mask png round trip") {
    TempDir dir("png_mask");
    Mask m(3, 3);
    m.at(0, 0) = m.at(1, 1) = m.at(2, 2) = 1;
    write_mask_png(dir.sub("m.png"), m);
    Mask back = read_mask_png(dir.sub("m.png"));
    CHECK(back == m);
}

TEST_CASE("missing file raises IoError") {
    CHECK_THROWS_AS(read_image_png("/nonexistent/nope.png"), IoError);
    CHECK_THROWS_AS(read_mask_png("/nonexistent/nope.png"), IoError);
}
