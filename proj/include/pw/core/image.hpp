#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace pw {

/// Dense row-major image grid with interleaved channels.
template <typename T>
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, T fill = T{})
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<size_t>(width) * height * channels, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    T& at(int x, int y, int c = 0) {
        assert(contains(x, y) && c >= 0 && c < channels_);
        return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }
    const T& at(int x, int y, int c = 0) const {
        assert(contains(x, y) && c >= 0 && c < channels_);
        return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }

    T* row(int y) { return data_.data() + static_cast<size_t>(y) * width_ * channels_; }
    const T* row(int y) const { return data_.data() + static_cast<size_t>(y) * width_ * channels_; }

    bool contains(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }
    bool same_size(const Image& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<T> data_;
};

using ImageU8 = Image<std::uint8_t>;
using ImageU16 = Image<std::uint16_t>;
using ImageF = Image<float>;

/// Bilinear sample of one channel; caller guarantees (x, y) is inside
/// [0, w-1] x [0, h-1].
template <typename T>
inline double bilinear(const Image<T>& img, double x, double y, int c) {
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    if (x0 > img.width() - 2) x0 = img.width() - 2;
    if (y0 > img.height() - 2) y0 = img.height() - 2;
    if (x0 < 0) x0 = 0;
    if (y0 < 0) y0 = 0;
    const double fx = x - x0;
    const double fy = y - y0;
    const double v00 = img.at(x0, y0, c);
    const double v10 = img.at(x0 + 1, y0, c);
    const double v01 = img.at(x0, y0 + 1, c);
    const double v11 = img.at(x0 + 1, y0 + 1, c);
    return v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy) +
           v01 * (1 - fx) * fy + v11 * fx * fy;
}

}  // namespace pw
