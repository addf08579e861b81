#include "lumisep/image.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace lumisep {

double LinearImage::max_value() const
{
    double m = 0.0;
    for (double v : data_) m = std::max(m, v);
    return m;
}

void LinearImage::validate() const
{
    for (double v : data_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(ErrorCode::InvalidArgument, "image contains negative or non-finite values");
        }
    }
}

ImagePair::ImagePair(LinearImage f, LinearImage nf) : flash(std::move(f)), noflash(std::move(nf))
{
    if (!flash.same_shape(noflash)) {
        throw Error(ErrorCode::DimensionMismatch, "flash and no-flash images differ in size");
    }
}

LinearImage operator+(const LinearImage& a, const LinearImage& b)
{
    if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "image sum");
    LinearImage out(a.width(), a.height());
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
    return out;
}

LinearImage operator*(const LinearImage& a, double s)
{
    LinearImage out = a;
    for (double& v : out.data()) v *= s;
    return out;
}

}  // namespace lumisep
