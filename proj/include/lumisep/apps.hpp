#pragma once

#include <span>
#include <vector>

#include "lumisep/separate.hpp"

namespace lumisep {

struct LightEdit {
    double brightness = 1.0;  // μ_j ≥ 0
    Vec3 coefficients;        // b̃_j, unit-norm
};

using RelightEdit = std::vector<LightEdit>;

/// Throws InvalidArgument for negative μ or non-unit b̃.
void validate_edit(const RelightEdit& edit);

/// Per-light per-pixel 3×3 maps from illuminant coefficients to RGB:
/// row k of M_j(p) is ‖β(p)‖ ẑ_j(p) α̂_pᵀ E^k.
struct RelightBundle {
    int width = 0;
    int height = 0;
    std::vector<Vec3> lights;
    std::vector<Field<Mat3>> mixing;

    int count() const { return static_cast<int>(lights.size()); }
};

RelightBundle build_relight_bundle(const AlphaField& alpha, const GammaField& gamma, const ShadingField& shading,
                                   const LightEstimate& lights, const CouplingTensor& coupling);

/// One row of mixing matrices for light j; used to stream bundles to disk.
void relight_bundle_row(const AlphaField& alpha, const GammaField& gamma, const ShadingField& shading,
                        const LightEstimate& lights, const CouplingTensor& coupling, int light, int row,
                        std::vector<Mat3>& out);

/// Ĩ^k(p) = Σ_j μ_j (M_j(p) b̃_j)_k, clamped at zero.
LinearImage relight(const RelightBundle& bundle, const RelightEdit& edit);

/// The edit that reproduces the separated sum: μ = 1, b̃ = b̂.
RelightEdit identity_edit(const RelightBundle& bundle);

/// Re-renders every light with the flash spectrum, keeping all shading.
LinearImage white_balance(const RelightBundle& bundle, const FlashCoefficients& flash);

/// s_j(p) = ‖β(p)‖ ẑ_j(p) = ‖a_p‖ η_j(p).
std::vector<Field<double>> shading_images(const GammaField& gamma, const ShadingField& shading);

/// ‖α_p‖ = ‖a_p‖ η_f(p): the pure flash seen as one more light along the view axis.
Field<double> flash_shading_image(const AlphaField& alpha);

struct NormalMap {
    Field<Vec3> normals;
    Field<double> albedo;
    Field<double> residual;
    Mask mask;
};

struct PhotometricOptions {
    std::size_t min_valid = 3;
    /// Per image, samples below this fraction of the image max count as shadowed.
    double shadow_fraction = 0.01;
    /// Optional per-light intensities; empty means all 1.
    std::vector<double> intensities;
};

/// Calibrated Lambertian photometric stereo: s_j = (I_j l_j)·(ρ n) solved in
/// least squares over the unshadowed lights at each pixel.
NormalMap photometric_stereo(std::span<const Field<double>> shading, std::span<const Vec3> directions,
                             const PhotometricOptions& options = {});

}  // namespace lumisep
