#include "lumisep/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "lumisep/parallel.hpp"

namespace lumisep {

double condition_number(const Mat3& m)
{
    Eigen::JacobiSVD<Mat3> svd(m);
    const Vec3& s = svd.singularValues();
    if (!(s[2] > 0.0)) return std::numeric_limits<double>::infinity();
    return s[0] / s[2];
}

Vec3 solve3(const Mat3& m, const Vec3& rhs)
{
    return m.partialPivLu().solve(rhs);
}

LinearImage pure_flash(const ImagePair& pair)
{
    if (!pair.flash.same_shape(pair.noflash)) {
        throw Error(ErrorCode::DimensionMismatch, "flash and no-flash images differ in size");
    }
    LinearImage out(pair.flash.width(), pair.flash.height());
    const auto& f = pair.flash.data();
    const auto& nf = pair.noflash.data();
    auto& o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::max(0.0, f[i] - nf[i]);
    return out;
}

AlphaField solve_alpha(const LinearImage& pure_flash, const CouplingTensor& coupling,
                       const FlashCoefficients& flash, double dark_threshold)
{
    const Mat3 system = coupling.flash_system(flash.f);
    const double cond = condition_number(system);
    if (!(cond < kDefaultCondLimit)) {
        throw Error(ErrorCode::SingularCoupling,
                    "flash coupling matrix has condition number " + std::to_string(cond));
    }
    const auto lu = system.partialPivLu();
    const double cutoff = dark_threshold * pure_flash.max_value();

    const int w = pure_flash.width();
    AlphaField out{Field<Vec3>(w, pure_flash.height(), Vec3::Zero()), Mask(w, pure_flash.height(), 0)};
    parallel_rows(pure_flash.height(), [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                const Vec3 pf = pure_flash.pixel(x, y);
                if (!(pf.maxCoeff() >= cutoff) || pf.maxCoeff() <= 0.0) continue;
                const Vec3 a = lu.solve(pf);
                if (!a.allFinite() || !(a.norm() > 0.0)) continue;
                out.alpha.at(x, y) = a;
                out.mask.at(x, y) = 1;
            }
        }
    });
    return out;
}

GammaField solve_beta_gamma(const LinearImage& noflash, const AlphaField& alpha,
                            const CouplingTensor& coupling, double cond_limit)
{
    if (!noflash.same_shape(alpha.alpha) || !alpha.mask.same_shape(alpha.alpha)) {
        throw Error(ErrorCode::DimensionMismatch, "no-flash image and alpha field differ in size");
    }
    const int w = noflash.width();
    const int h = noflash.height();
    GammaField out{Field<Vec3>(w, h, Vec3::Zero()), Field<double>(w, h, 0.0), Mask(w, h, 0)};
    parallel_rows(h, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!alpha.mask.at(x, y)) continue;
                const Vec3 nf = noflash.pixel(x, y);
                if (!(nf.cwiseAbs().maxCoeff() > 0.0)) continue;
                const Vec3 a_hat = alpha.alpha.at(x, y).normalized();
                const Mat3 system = coupling.reflectance_system(a_hat);
                if (!(condition_number(system) <= cond_limit)) continue;
                const Vec3 beta = solve3(system, nf);
                const double norm = beta.norm();
                if (!std::isfinite(norm) || !(norm > 0.0)) continue;
                out.gamma.at(x, y) = beta / norm;
                out.beta_norm.at(x, y) = norm;
                out.mask.at(x, y) = 1;
            }
        }
    });
    return out;
}

}  // namespace lumisep
