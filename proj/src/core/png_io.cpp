#include "pw/core/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>

namespace pw {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_throw(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw std::runtime_error("cannot open " + path);
    return f;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    PngReader() {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) throw std::runtime_error("libpng init failed");
    }
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    PngWriter() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) throw std::runtime_error("libpng init failed");
    }
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

}  // namespace

ImageU8 read_png8(const std::string& path) {
    FilePtr f = open_or_throw(path, "rb");
    PngReader r;
    if (setjmp(png_jmpbuf(r.png))) throw std::runtime_error("png read error: " + path);
    png_init_io(r.png, f.get());
    png_read_info(r.png, r.info);

    png_set_palette_to_rgb(r.png);
    png_set_expand_gray_1_2_4_to_8(r.png);
    png_set_strip_16(r.png);
    png_set_strip_alpha(r.png);
    png_read_update_info(r.png, r.info);

    const int w = static_cast<int>(png_get_image_width(r.png, r.info));
    const int h = static_cast<int>(png_get_image_height(r.png, r.info));
    const int ch = static_cast<int>(png_get_channels(r.png, r.info));
    if (ch != 1 && ch != 3) throw std::runtime_error("unsupported channel count in " + path);

    ImageU8 img(w, h, ch);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = img.row(y);
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return img;
}

ImageU16 read_png_gray16(const std::string& path) {
    FilePtr f = open_or_throw(path, "rb");
    PngReader r;
    if (setjmp(png_jmpbuf(r.png))) throw std::runtime_error("png read error: " + path);
    png_init_io(r.png, f.get());
    png_read_info(r.png, r.info);
    if (png_get_bit_depth(r.png, r.info) != 16 ||
        png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_GRAY)
        throw std::runtime_error("not a 16-bit gray PNG: " + path);
    png_set_swap(r.png);  // stored big-endian
    png_read_update_info(r.png, r.info);

    const int w = static_cast<int>(png_get_image_width(r.png, r.info));
    const int h = static_cast<int>(png_get_image_height(r.png, r.info));
    ImageU16 img(w, h, 1);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = reinterpret_cast<png_bytep>(img.row(y));
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return img;
}

namespace {

void write_png_impl(const std::string& path, int w, int h, int color_type,
                    int bit_depth, const std::vector<png_bytep>& rows,
                    bool swap16 = false) {
    FilePtr f = open_or_throw(path, "wb");
    PngWriter wr;
    if (setjmp(png_jmpbuf(wr.png))) throw std::runtime_error("png write error: " + path);
    png_init_io(wr.png, f.get());
    png_set_IHDR(wr.png, wr.info, w, h, bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(wr.png, wr.info);
    if (swap16) png_set_swap(wr.png);
    png_write_image(wr.png, const_cast<png_bytep*>(rows.data()));
    png_write_end(wr.png, nullptr);
}

}  // namespace

void write_png_rgb8(const std::string& path, const ImageU8& img) {
    if (img.channels() != 3) throw std::runtime_error("write_png_rgb8 needs 3 channels");
    std::vector<png_bytep> rows(img.height());
    for (int y = 0; y < img.height(); ++y)
        rows[y] = const_cast<png_bytep>(img.row(y));
    write_png_impl(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, 8, rows);
}

void write_png_gray8(const std::string& path, const ImageU8& img) {
    if (img.channels() != 1) throw std::runtime_error("write_png_gray8 needs 1 channel");
    std::vector<png_bytep> rows(img.height());
    for (int y = 0; y < img.height(); ++y)
        rows[y] = const_cast<png_bytep>(img.row(y));
    write_png_impl(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 8, rows);
}

void write_png_gray16(const std::string& path, const ImageU16& img) {
    if (img.channels() != 1) throw std::runtime_error("write_png_gray16 needs 1 channel");
    std::vector<png_bytep> rows(img.height());
    for (int y = 0; y < img.height(); ++y)
        rows[y] = const_cast<png_bytep>(reinterpret_cast<const png_byte*>(img.row(y)));
    write_png_impl(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 16, rows, true);
}

void write_png_mask1(const std::string& path, const ImageU8& mask) {
    if (mask.channels() != 1) throw std::runtime_error("write_png_mask1 needs 1 channel");
    const int w = mask.width();
    const int h = mask.height();
    const int stride = (w + 7) / 8;
    std::vector<png_byte> packed(static_cast<size_t>(stride) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y))
                packed[static_cast<size_t>(y) * stride + x / 8] |=
                    static_cast<png_byte>(0x80u >> (x % 8));
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = packed.data() + static_cast<size_t>(y) * stride;
    write_png_impl(path, w, h, PNG_COLOR_TYPE_GRAY, 1, rows);
}

}  // namespace pw
