#include "intrinsic/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <png.h>

#include "intrinsic/error.hpp"

namespace intrinsic {

double Image::intensity(int pixel) const {
    double sum = 0.0;
    for (int c = 0; c < channels_; ++c) sum += atIndex(pixel, c);
    return sum / channels_;
}

std::array<double, 3> Image::chromaticity(int pixel) const {
    std::array<double, 3> chroma{1.0 / 3, 1.0 / 3, 1.0 / 3};
    if (channels_ == 1) return chroma;
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) sum += atIndex(pixel, c);
    if (sum <= 0.0) return chroma;
    for (int c = 0; c < 3; ++c) chroma[c] = atIndex(pixel, c) / sum;
    return chroma;
}

double srgb_to_linear(double v) {
    if (v <= 0.04045) return v / 12.92;
    return std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    if (v <= 0.0031308) return 12.92 * v;
    return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image load_png(const std::string& path, bool srgb) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open PNG for reading: " + path);

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
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (bit_depth == 16) png_set_swap(png);  // stream is big-endian
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    color_type = png_get_color_type(png, info);
    int channels = (color_type == PNG_COLOR_TYPE_GRAY) ? 1 : 3;
    double scale = (bit_depth == 16) ? 65535.0 : 255.0;

    std::vector<png_byte> row(png_get_rowbytes(png, info));
    Image img(static_cast<int>(w), static_cast<int>(h), channels);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                double v;
                if (bit_depth == 16) {
                    uint16_t raw;
                    std::memcpy(&raw, row.data() + 2 * (x * channels + c), 2);
                    v = raw / scale;
                } else {
                    v = row[x * channels + c] / scale;
                }
                img.at(static_cast<int>(x), static_cast<int>(y), c) = srgb ? srgb_to_linear(v) : v;
            }
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png16(const Image& img, const std::string& path, bool srgb) {
    if (img.empty()) throw ValidationError("cannot save empty image: " + path);
    const std::string tmp = path + ".tmp";
    {
        FilePtr fp(std::fopen(tmp.c_str(), "wb"));
        if (!fp) throw IoError("cannot open PNG for writing: " + tmp);

        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (!png) throw IoError("png_create_write_struct failed");
        png_infop info = png_create_info_struct(png);
        if (!info) {
            png_destroy_write_struct(&png, nullptr);
            throw IoError("png_create_info_struct failed");
        }
        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            throw IoError("failed to encode PNG: " + tmp);
        }

        png_init_io(png, fp.get());
        int color_type = (img.channels() == 1) ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
        png_set_IHDR(png, info, img.width(), img.height(), 16, color_type,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);

        std::vector<png_byte> row(static_cast<size_t>(img.width()) * img.channels() * 2);
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                for (int c = 0; c < img.channels(); ++c) {
                    double v = img.at(x, y, c);
                    if (srgb) v = linear_to_srgb(v);
                    v = std::clamp(v, 0.0, 1.0);
                    auto raw = static_cast<uint16_t>(std::lround(v * 65535.0));
                    row[2 * (x * img.channels() + c)] = static_cast<png_byte>(raw >> 8);
                    row[2 * (x * img.channels() + c) + 1] = static_cast<png_byte>(raw & 0xff);
                }
            }
            png_write_row(png, row.data());
        }
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot move " + tmp + " to " + path);
}

Image load_f64(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open sidecar for reading: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "F64I", 4) != 0)
        throw IoError("bad sidecar magic in " + path);
    uint32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) throw IoError("truncated sidecar header in " + path);
    Image img(static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]));
    in.read(reinterpret_cast<char*>(img.data().data()),
            static_cast<std::streamsize>(img.data().size() * sizeof(double)));
    if (!in) throw IoError("truncated sidecar payload in " + path);
    return img;
}

void save_f64(const Image& img, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open sidecar for writing: " + tmp);
        out.write("F64I", 4);
        uint32_t dims[3] = {static_cast<uint32_t>(img.width()),
                            static_cast<uint32_t>(img.height()),
                            static_cast<uint32_t>(img.channels())};
        out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
        out.write(reinterpret_cast<const char*>(img.data().data()),
                  static_cast<std::streamsize>(img.data().size() * sizeof(double)));
        if (!out) throw IoError("failed writing sidecar: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot move " + tmp + " to " + path);
}

Image downsample_to(const Image& img, int max_dim) {
    int longest = std::max(img.width(), img.height());
    if (longest <= max_dim) return img;
    double factor = static_cast<double>(max_dim) / longest;
    int nw = std::max(1, static_cast<int>(std::lround(img.width() * factor)));
    int nh = std::max(1, static_cast<int>(std::lround(img.height() * factor)));

    Image out(nw, nh, img.channels());
    for (int y = 0; y < nh; ++y) {
        // source span [y0, y1) x [x0, x1), fractional coverage weighted
        double sy0 = static_cast<double>(y) * img.height() / nh;
        double sy1 = static_cast<double>(y + 1) * img.height() / nh;
        for (int x = 0; x < nw; ++x) {
            double sx0 = static_cast<double>(x) * img.width() / nw;
            double sx1 = static_cast<double>(x + 1) * img.width() / nw;
            for (int c = 0; c < img.channels(); ++c) {
                double acc = 0.0, area = 0.0;
                for (int yy = static_cast<int>(sy0); yy < static_cast<int>(std::ceil(sy1)); ++yy) {
                    double wy = std::min<double>(yy + 1, sy1) - std::max<double>(yy, sy0);
                    for (int xx = static_cast<int>(sx0); xx < static_cast<int>(std::ceil(sx1)); ++xx) {
                        double wx = std::min<double>(xx + 1, sx1) - std::max<double>(xx, sx0);
                        acc += wx * wy * img.at(std::min(xx, img.width() - 1),
                                                std::min(yy, img.height() - 1), c);
                        area += wx * wy;
                    }
                }
                out.at(x, y, c) = acc / area;
            }
        }
    }
    return out;
}

Image to_grayscale(const Image& img) {
    Image out(img.width(), img.height(), 1);
    for (int p = 0; p < img.pixels(); ++p) out.atIndex(p) = img.intensity(p);
    return out;
}

Image multiply(const Image& color, const Image& gray) {
    if (color.width() != gray.width() || color.height() != gray.height())
        throw ValidationError("multiply: dimension mismatch");
    Image out(color.width(), color.height(), color.channels());
    for (int p = 0; p < color.pixels(); ++p)
        for (int c = 0; c < color.channels(); ++c)
            out.atIndex(p, c) = color.atIndex(p, c) * gray.atIndex(p, 0);
    return out;
}

}  // namespace intrinsic
