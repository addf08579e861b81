#pragma once

#include "lumisep/image.hpp"
#include "lumisep/spectral.hpp"

namespace lumisep {

/// α_p = η_f(p)·a_p: reflectance coefficients up to the unknown flash shading.
struct AlphaField {
    Field<Vec3> alpha;
    Mask mask;
};

/// Γ(p) = β(p)/‖β(p)‖ with β(p) = ‖a_p‖ Σ_i η_i(p) b_i.
struct GammaField {
    Field<Vec3> gamma;
    Field<double> beta_norm;
    Mask mask;
};

inline constexpr double kDefaultDarkThreshold = 1e-3;
inline constexpr double kDefaultCondLimit = 1e6;

/// 2-norm condition number via singular values.
double condition_number(const Mat3& m);

/// Partial-pivoting 3×3 solve.
Vec3 solve3(const Mat3& m, const Vec3& rhs);

/// max(0, I_f − I_nf) per pixel and channel.
LinearImage pure_flash(const ImagePair& pair);

/// Solves (E^k f)ᵀ α_p = I_pf^k(p). Pixels whose largest channel is below
/// darkThreshold × (image max) are masked out.
AlphaField solve_alpha(const LinearImage& pure_flash, const CouplingTensor& coupling,
                       const FlashCoefficients& flash, double dark_threshold = kDefaultDarkThreshold);

/// Solves (α̂_pᵀ E^k) β = I_nf^k(p) on every valid α pixel.
GammaField solve_beta_gamma(const LinearImage& noflash, const AlphaField& alpha,
                            const CouplingTensor& coupling, double cond_limit = kDefaultCondLimit);

}  // namespace lumisep
