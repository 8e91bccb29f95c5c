#include "nsaug/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace nsaug {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

struct PngRaw {
    int height = 0;
    int width = 0;
    int channels = 0;   // after expansion: 1, 2, 3 or 4
    int bit_depth = 0;  // 8 or 16
    std::vector<uint16_t> samples;  // interleaved, already scaled to bit depth
};

PngRaw read_png_raw(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open PNG: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0) {
        throw IoError("not a PNG file: " + path);
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG: " + path);
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_uint_32 width = png_get_image_width(png, info);
    png_uint_32 height = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_swap(png);  // libpng delivers big-endian 16-bit

    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    int channels = png_get_channels(png, info);
    size_t rowbytes = png_get_rowbytes(png, info);

    std::vector<png_byte> buffer(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    PngRaw raw;
    raw.height = static_cast<int>(height);
    raw.width = static_cast<int>(width);
    raw.channels = channels;
    raw.bit_depth = bit_depth;
    raw.samples.resize(static_cast<size_t>(height) * width * channels);
    if (bit_depth == 16) {
        const auto* src = reinterpret_cast<const uint16_t*>(buffer.data());
        std::copy(src, src + raw.samples.size(), raw.samples.begin());
    } else {
        for (size_t i = 0; i < raw.samples.size(); ++i) raw.samples[i] = buffer[i];
    }
    return raw;
}

}  // namespace

Image read_image_png(const std::string& path) {
    PngRaw raw = read_png_raw(path);
    // dtype maximum, not per-image max: keeps relative brightness comparable
    const float denom = raw.bit_depth == 16 ? 65535.f : 255.f;
    Image img(raw.height, raw.width);
    const int ch = raw.channels;
    for (int y = 0; y < raw.height; ++y) {
        for (int x = 0; x < raw.width; ++x) {
            const uint16_t* px = &raw.samples[(static_cast<size_t>(y) * raw.width + x) * ch];
            float r, g, b;
            if (ch >= 3) {
                r = px[0] / denom;
                g = px[1] / denom;
                b = px[2] / denom;
            } else {
                r = g = b = px[0] / denom;
            }
            img.at(y, x, 0) = r;
            img.at(y, x, 1) = g;
            img.at(y, x, 2) = b;
        }
    }
    return img;
}

Mask read_mask_png(const std::string& path) {
    PngRaw raw = read_png_raw(path);
    Mask m(raw.height, raw.width);
    const int ch = raw.channels;
    for (size_t i = 0; i < m.data.size(); ++i) {
        m.data[i] = raw.samples[i * ch] != 0 ? 1 : 0;
    }
    return m;
}

namespace {

void write_png_bytes(const std::string& path, int height, int width, int channels,
                     const std::vector<png_byte>& bytes) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG: " + path);
    }

    png_init_io(png, fp.get());
    int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, width, height, 8, color, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    size_t rowbytes = static_cast<size_t>(width) * channels;
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) {
        rows[y] = const_cast<png_bytep>(bytes.data() + y * rowbytes);
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_image_png(const std::string& path, const Image& img) {
    std::vector<png_byte> bytes(img.pixel_count() * 3);
    for (size_t i = 0; i < bytes.size(); ++i) {
        float v = std::fmin(1.f, std::fmax(0.f, img.data[i]));
        bytes[i] = static_cast<png_byte>(std::lround(v * 255.f));
    }
    write_png_bytes(path, img.height, img.width, 3, bytes);
}

void write_mask_png(const std::string& path, const Mask& mask) {
    std::vector<png_byte> bytes(mask.data.size());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
    write_png_bytes(path, mask.height, mask.width, 1, bytes);
}

}  // namespace nsaug
