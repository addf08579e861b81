#pragma once

#include <array>
#include <span>
#include <vector>

#include "lumisep/hullfit.hpp"

namespace lumisep {

inline constexpr double kResidualFlagThreshold = 0.05;
/// Residuals at or below this count as an exact cone fit.
inline constexpr double kZeroResidual = 1e-9;

/// z_i(p) ≥ 0 with Σ_i z_i b̂_i ≈ Γ(p). Unused trailing entries of z stay 0.
struct ShadingField {
    int n = 0;
    Field<std::array<double, 3>> z;
    Field<double> residual;
    Mask mask;
    Mask flagged;  // residual above kResidualFlagThreshold; still separated
};

struct ConeFit {
    std::array<double, 3> z{0.0, 0.0, 0.0};
    double residual = 0.0;
};

/// min ‖target − Σ z_i columns_i‖ subject to z ≥ 0, for at most three columns.
/// The unconstrained least-squares solution is taken when it is non-negative;
/// otherwise every support pattern is solved and the best feasible one kept.
ConeFit fit_cone(const Vec3& target, std::span<const Vec3> columns);

ShadingField relative_shading(const GammaField& gamma, const LightEstimate& lights);

/// How α enters the layer synthesis. Normalized makes the layers sum to the
/// no-flash image; Unnormalized is the literal ‖β‖ αᵀE^k ẑ b̂ form, which
/// carries an extra ‖α‖ factor. Kept for comparison only.
enum class AlphaConvention { Normalized, Unnormalized };

struct SeparationResult {
    std::vector<LinearImage> layers;
    ShadingField shading;
    LightEstimate lights;
    Mask mask;
};

SeparationResult separate_images(const LinearImage& noflash, const AlphaField& alpha, const GammaField& gamma,
                                 const ShadingField& shading, const LightEstimate& lights,
                                 const CouplingTensor& coupling,
                                 AlphaConvention convention = AlphaConvention::Normalized);

}  // namespace lumisep
