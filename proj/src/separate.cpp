#include "lumisep/separate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "lumisep/parallel.hpp"

namespace lumisep {

namespace {

struct SubsetFit {
    bool feasible = false;
    ConeFit fit;
};

SubsetFit solve_subset(const Vec3& target, std::span<const Vec3> columns, unsigned subset)
{
    std::array<int, 3> cols{};
    int m = 0;
    for (int i = 0; i < static_cast<int>(columns.size()); ++i) {
        if (subset & (1u << i)) cols[m++] = i;
    }
    Eigen::Matrix<double, 3, Eigen::Dynamic> B(3, m);
    for (int c = 0; c < m; ++c) B.col(c) = columns[cols[c]];
    const Eigen::VectorXd coef = B.colPivHouseholderQr().solve(target);

    SubsetFit out;
    out.feasible = true;
    for (int c = 0; c < m; ++c) {
        if (!(coef[c] >= 0.0)) out.feasible = false;
        out.fit.z[cols[c]] = coef[c];
    }
    out.fit.residual = (target - B * coef).norm();
    return out;
}

}  // namespace

ConeFit fit_cone(const Vec3& target, std::span<const Vec3> columns)
{
    const auto n = columns.size();
    if (n < 1 || n > 3) throw Error(ErrorCode::InvalidCount, "cone fit supports 1 to 3 columns");
    const unsigned full = (1u << n) - 1;

    SubsetFit unconstrained = solve_subset(target, columns, full);
    if (unconstrained.feasible) return unconstrained.fit;

    ConeFit best;
    best.residual = target.norm();  // z = 0
    for (unsigned subset = 1; subset < full; ++subset) {
        SubsetFit s = solve_subset(target, columns, subset);
        if (s.feasible && s.fit.residual < best.residual) best = s.fit;
    }
    return best;
}

ShadingField relative_shading(const GammaField& gamma, const LightEstimate& lights)
{
    validate_lights(lights);
    const int w = gamma.gamma.width;
    const int h = gamma.gamma.height;
    ShadingField out;
    out.n = lights.count();
    out.z = Field<std::array<double, 3>>(w, h, {0.0, 0.0, 0.0});
    out.residual = Field<double>(w, h, 0.0);
    out.mask = Mask(w, h, 0);
    out.flagged = Mask(w, h, 0);

    parallel_rows(h, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!gamma.mask.at(x, y)) continue;
                const ConeFit fit = fit_cone(gamma.gamma.at(x, y), lights.coefficients);
                out.z.at(x, y) = fit.z;
                out.residual.at(x, y) = fit.residual;
                out.mask.at(x, y) = 1;
                out.flagged.at(x, y) = fit.residual > kResidualFlagThreshold ? 1 : 0;
            }
        }
    });
    return out;
}

SeparationResult separate_images(const LinearImage& noflash, const AlphaField& alpha, const GammaField& gamma,
                                 const ShadingField& shading, const LightEstimate& lights,
                                 const CouplingTensor& coupling, AlphaConvention convention)
{
    if (!noflash.same_shape(alpha.alpha) || !noflash.same_shape(gamma.gamma) || !noflash.same_shape(shading.z)) {
        throw Error(ErrorCode::DimensionMismatch, "separation inputs differ in size");
    }
    if (shading.n != lights.count()) {
        throw Error(ErrorCode::CountMismatch, "shading and light counts differ");
    }
    const int w = noflash.width();
    const int h = noflash.height();
    const int n = lights.count();

    SeparationResult out;
    out.layers.assign(n, LinearImage(w, h));
    out.mask = Mask(w, h, 0);
    parallel_rows(h, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!alpha.mask.at(x, y) || !gamma.mask.at(x, y) || !shading.mask.at(x, y)) continue;
                out.mask.at(x, y) = 1;
                const Vec3& a = alpha.alpha.at(x, y);
                const Vec3 a_used = convention == AlphaConvention::Normalized ? Vec3(a.normalized()) : a;
                const Mat3 system = coupling.reflectance_system(a_used);
                const double scale = gamma.beta_norm.at(x, y);
                for (int j = 0; j < n; ++j) {
                    const Vec3 rgb = system * (scale * shading.z.at(x, y)[j] * lights.coefficients[j]);
                    out.layers[j].set_pixel(x, y, rgb.cwiseMax(0.0));
                }
            }
        }
    });
    out.shading = shading;
    out.lights = lights;
    return out;
}

}  // namespace lumisep
