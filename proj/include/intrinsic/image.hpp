#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace intrinsic {

/// Linear-light raster with interleaved channels (1 = grayscale, 3 = RGB).
/// Pixel index convention is row-major: idx = y * width + x.
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, double fill = 0.0)
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<size_t>(width) * height * channels, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    int pixels() const { return width_ * height_; }
    bool empty() const { return data_.empty(); }

    double& at(int x, int y, int c = 0) {
        return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }
    double at(int x, int y, int c = 0) const {
        return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }
    double& atIndex(int pixel, int c = 0) {
        return data_[static_cast<size_t>(pixel) * channels_ + c];
    }
    double atIndex(int pixel, int c = 0) const {
        return data_[static_cast<size_t>(pixel) * channels_ + c];
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    /// Mean over channels at one pixel.
    double intensity(int pixel) const;

    /// Sum-normalized color at one pixel; (1/3,1/3,1/3) where the pixel is black.
    std::array<double, 3> chromaticity(int pixel) const;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

// IEC 61966-2-1 transfer function, applied per sample.
double srgb_to_linear(double v);
double linear_to_srgb(double v);

/// Decode a PNG. 8- and 16-bit gray/RGB inputs are accepted; alpha is dropped.
/// With srgb=true samples pass through the sRGB EOTF, otherwise they are the
/// raw code values scaled to [0,1].
Image load_png(const std::string& path, bool srgb = true);

/// Encode as 16-bit PNG. With srgb=true samples are encoded with the sRGB
/// OETF (clipped to [0,1]); otherwise raw values are scaled and clipped.
void save_png16(const Image& img, const std::string& path, bool srgb = true);

// Raw float64 sidecar: "F64I" magic, u32 width/height/channels, then samples.
Image load_f64(const std::string& path);
void save_f64(const Image& img, const std::string& path);

/// Area-average downsample so that max(width, height) <= max_dim.
Image downsample_to(const Image& img, int max_dim);

/// Single-channel image of per-pixel intensities.
Image to_grayscale(const Image& img);

/// Elementwise product of a color image with a grayscale field.
Image multiply(const Image& color, const Image& gray);

}  // namespace intrinsic
