#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "lumisep/error.hpp"

namespace lumisep {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Dense row-major H×W grid of per-pixel values.
template <class T>
struct Field {
    int width = 0;
    int height = 0;
    std::vector<T> values;

    Field() = default;
    Field(int w, int h, const T& init = T{})
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, init) {}

    std::size_t size() const { return values.size(); }
    T& operator[](std::size_t i) { return values[i]; }
    const T& operator[](std::size_t i) const { return values[i]; }
    T& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    const T& at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    template <class U>
    bool same_shape(const Field<U>& other) const
    {
        return width == other.width && height == other.height;
    }
};

using Mask = Field<std::uint8_t>;

inline std::size_t count_valid(const Mask& mask)
{
    std::size_t n = 0;
    for (auto v : mask.values) n += v ? 1 : 0;
    return n;
}

/// Linear radiometric RGB buffer, H×W×3 interleaved, row-major (row 0 is the top).
class LinearImage {
public:
    LinearImage() = default;
    LinearImage(int width, int height, double init = 0.0)
        : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height * 3, init)
    {
        if (width < 0 || height < 0) {
            throw Error(ErrorCode::InvalidArgument, "negative image dimensions");
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    Vec3 pixel(std::size_t i) const { return {data_[3 * i], data_[3 * i + 1], data_[3 * i + 2]}; }
    Vec3 pixel(int x, int y) const { return pixel(static_cast<std::size_t>(y) * width_ + x); }
    void set_pixel(std::size_t i, const Vec3& v)
    {
        data_[3 * i] = v[0];
        data_[3 * i + 1] = v[1];
        data_[3 * i + 2] = v[2];
    }
    void set_pixel(int x, int y, const Vec3& v) { set_pixel(static_cast<std::size_t>(y) * width_ + x, v); }

    double& operator()(int x, int y, int c) { return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c]; }
    double operator()(int x, int y, int c) const { return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double max_value() const;
    bool same_shape(const LinearImage& other) const
    {
        return width_ == other.width_ && height_ == other.height_;
    }
    template <class T>
    bool same_shape(const Field<T>& f) const
    {
        return width_ == f.width && height_ == f.height;
    }

    /// Throws unless every value is finite and non-negative.
    void validate() const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

struct ImagePair {
    LinearImage flash;
    LinearImage noflash;

    ImagePair() = default;
    ImagePair(LinearImage f, LinearImage nf);
};

LinearImage operator+(const LinearImage& a, const LinearImage& b);
LinearImage operator*(const LinearImage& a, double s);

}  // namespace lumisep
