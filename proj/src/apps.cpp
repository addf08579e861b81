#include "lumisep/apps.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "lumisep/parallel.hpp"

namespace lumisep {

void validate_edit(const RelightEdit& edit)
{
    for (const auto& e : edit) {
        if (!(e.brightness >= 0.0) || !std::isfinite(e.brightness)) {
            throw Error(ErrorCode::InvalidArgument, "brightness must be non-negative");
        }
        if (!e.coefficients.allFinite() || std::abs(e.coefficients.norm() - 1.0) > 1e-9) {
            throw Error(ErrorCode::InvalidArgument, "edited light coefficients must be unit-norm");
        }
    }
}

void relight_bundle_row(const AlphaField& alpha, const GammaField& gamma, const ShadingField& shading,
                        const LightEstimate& lights, const CouplingTensor& coupling, int light, int row,
                        std::vector<Mat3>& out)
{
    if (light < 0 || light >= lights.count()) throw Error(ErrorCode::InvalidArgument, "light index out of range");
    const int w = alpha.alpha.width;
    out.assign(w, Mat3::Zero());
    for (int x = 0; x < w; ++x) {
        if (!alpha.mask.at(x, row) || !gamma.mask.at(x, row) || !shading.mask.at(x, row)) continue;
        const double scale = gamma.beta_norm.at(x, row) * shading.z.at(x, row)[light];
        out[x] = scale * coupling.reflectance_system(alpha.alpha.at(x, row).normalized());
    }
}

RelightBundle build_relight_bundle(const AlphaField& alpha, const GammaField& gamma, const ShadingField& shading,
                                   const LightEstimate& lights, const CouplingTensor& coupling)
{
    if (!alpha.alpha.same_shape(gamma.gamma) || !alpha.alpha.same_shape(shading.z)) {
        throw Error(ErrorCode::DimensionMismatch, "bundle inputs differ in size");
    }
    if (shading.n != lights.count()) throw Error(ErrorCode::CountMismatch, "shading and light counts differ");
    RelightBundle bundle;
    bundle.width = alpha.alpha.width;
    bundle.height = alpha.alpha.height;
    bundle.lights = lights.coefficients;
    bundle.mixing.assign(lights.count(), Field<Mat3>(bundle.width, bundle.height, Mat3::Zero()));
    for (int j = 0; j < lights.count(); ++j) {
        parallel_rows(bundle.height, [&](int y0, int y1) {
            std::vector<Mat3> row;
            for (int y = y0; y < y1; ++y) {
                relight_bundle_row(alpha, gamma, shading, lights, coupling, j, y, row);
                std::copy(row.begin(), row.end(), bundle.mixing[j].values.begin() + static_cast<std::ptrdiff_t>(y) * bundle.width);
            }
        });
    }
    return bundle;
}

LinearImage relight(const RelightBundle& bundle, const RelightEdit& edit)
{
    if (static_cast<int>(edit.size()) != bundle.count()) {
        throw Error(ErrorCode::CountMismatch, "edit has " + std::to_string(edit.size()) + " lights, bundle has " +
                                                  std::to_string(bundle.count()));
    }
    validate_edit(edit);
    LinearImage out(bundle.width, bundle.height);
    parallel_rows(bundle.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < bundle.width; ++x) {
                Vec3 rgb = Vec3::Zero();
                for (int j = 0; j < bundle.count(); ++j) {
                    rgb += edit[j].brightness * (bundle.mixing[j].at(x, y) * edit[j].coefficients);
                }
                out.set_pixel(x, y, rgb.cwiseMax(0.0));
            }
        }
    });
    return out;
}

RelightEdit identity_edit(const RelightBundle& bundle)
{
    RelightEdit edit;
    for (const auto& b : bundle.lights) edit.push_back({1.0, b});
    return edit;
}

LinearImage white_balance(const RelightBundle& bundle, const FlashCoefficients& flash)
{
    RelightEdit edit(bundle.count(), LightEdit{1.0, flash.f});
    return relight(bundle, edit);
}

std::vector<Field<double>> shading_images(const GammaField& gamma, const ShadingField& shading)
{
    std::vector<Field<double>> out(shading.n, Field<double>(gamma.gamma.width, gamma.gamma.height, 0.0));
    for (std::size_t i = 0; i < gamma.gamma.size(); ++i) {
        if (!gamma.mask[i] || !shading.mask[i]) continue;
        for (int j = 0; j < shading.n; ++j) out[j][i] = gamma.beta_norm[i] * shading.z[i][j];
    }
    return out;
}

Field<double> flash_shading_image(const AlphaField& alpha)
{
    Field<double> out(alpha.alpha.width, alpha.alpha.height, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (alpha.mask[i]) out[i] = alpha.alpha[i].norm();
    }
    return out;
}

NormalMap photometric_stereo(std::span<const Field<double>> shading, std::span<const Vec3> directions,
                             const PhotometricOptions& options)
{
    const std::size_t m = directions.size();
    if (shading.size() != m) throw Error(ErrorCode::CountMismatch, "one shading image per light direction");
    if (m < 3) throw Error(ErrorCode::DegenerateDirections, "photometric stereo needs at least three lights");
    if (!options.intensities.empty() && options.intensities.size() != m) {
        throw Error(ErrorCode::CountMismatch, "one intensity per light direction");
    }
    Eigen::MatrixXd lights(m, 3);
    for (std::size_t j = 0; j < m; ++j) {
        const double gain = options.intensities.empty() ? 1.0 : options.intensities[j];
        lights.row(static_cast<Eigen::Index>(j)) = gain * directions[j].normalized().transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lights);
    if (!(svd.singularValues()[2] > 1e-3)) {
        throw Error(ErrorCode::DegenerateDirections, "light directions are nearly coplanar");
    }
    const int w = shading[0].width;
    const int h = shading[0].height;
    std::vector<double> cutoff(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (shading[j].width != w || shading[j].height != h) {
            throw Error(ErrorCode::DimensionMismatch, "shading images differ in size");
        }
        double peak = 0.0;
        for (double v : shading[j].values) peak = std::max(peak, v);
        cutoff[j] = options.shadow_fraction * peak;
    }

    NormalMap out{Field<Vec3>(w, h, Vec3::Zero()), Field<double>(w, h, 0.0), Field<double>(w, h, 0.0), Mask(w, h, 0)};
    parallel_rows(h, [&](int y0, int y1) {
        std::vector<Eigen::Index> rows;
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                rows.clear();
                for (std::size_t j = 0; j < m; ++j) {
                    const double s = shading[j].at(x, y);
                    if (s > cutoff[j] && s > 0.0) rows.push_back(static_cast<Eigen::Index>(j));
                }
                if (rows.size() < options.min_valid || rows.size() < 3) continue;
                Eigen::MatrixXd a(rows.size(), 3);
                Eigen::VectorXd b(rows.size());
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    a.row(static_cast<Eigen::Index>(r)) = lights.row(rows[r]);
                    b[static_cast<Eigen::Index>(r)] = shading[rows[r]].at(x, y);
                }
                const auto qr = a.colPivHouseholderQr();
                if (qr.rank() < 3) continue;
                const Vec3 g = qr.solve(b);
                const double albedo = g.norm();
                if (!(albedo > 0.0) || !std::isfinite(albedo)) continue;
                const Vec3 n = g / albedo;
                if (n.z() < 0.0) continue;
                out.normals.at(x, y) = n;
                out.albedo.at(x, y) = albedo;
                out.residual.at(x, y) = (a * g - b).norm();
                out.mask.at(x, y) = 1;
            }
        }
    });
    return out;
}

}  // namespace lumisep
