#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lumisep/image.hpp"

namespace lumisep {

/// 400–700 nm in 10 nm steps.
std::vector<double> default_grid();

/// A sampled function of wavelength. Wavelengths must be strictly increasing
/// and every sample finite.
class SpectralCurve {
public:
    SpectralCurve() = default;
    SpectralCurve(std::vector<double> wavelengths, std::vector<double> values);

    static SpectralCurve constant(const std::vector<double>& grid, double value);

    const std::vector<double>& wavelengths() const { return wavelengths_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    bool same_grid(const SpectralCurve& other) const;
    SpectralCurve scaled(double s) const;

private:
    std::vector<double> wavelengths_;
    std::vector<double> values_;
};

enum class SpectralRole { Reflectance, Illumination };

std::string role_name(SpectralRole role);
SpectralRole parse_role(const std::string& name);

/// Throws InvalidArgument when a curve violates the value range of its role
/// (reflectance in [0,1], illumination non-negative).
void validate_role(const SpectralCurve& curve, SpectralRole role);

struct CameraResponse {
    std::array<SpectralCurve, 3> channels;  // r, g, b

    CameraResponse() = default;
    explicit CameraResponse(std::array<SpectralCurve, 3> rgb);

    const std::vector<double>& grid() const { return channels[0].wavelengths(); }
    /// Sum of the three channels; the PCA weight.
    SpectralCurve total() const;
};

/// Three basis vectors, orthonormal under ⟨u,v⟩_w = Σ w u v Δλ.
struct SpectralBasis {
    SpectralRole role = SpectralRole::Reflectance;
    std::array<SpectralCurve, 3> vectors;
    SpectralCurve weight;
    std::string weight_provenance = "sum of camera response channels";

    const std::vector<double>& grid() const { return vectors[0].wavelengths(); }
};

/// E^k(i,j) = ∫ ρ̃_i S^k ℓ̃_j dλ for k = r, g, b.
struct CouplingTensor {
    std::array<Mat3, 3> E;

    /// Rows (E^k f)ᵀ: maps reflectance coefficients to pure-flash RGB.
    Mat3 flash_system(const Vec3& f) const;
    /// Rows (aᵀ E^k): maps illumination coefficients to RGB for reflectance a.
    Mat3 reflectance_system(const Vec3& a) const;
};

struct FlashCoefficients {
    Vec3 f = Vec3::UnitX();
};

/// Per-sample Δλ used by the weighted inner product (cell widths; constant on a uniform grid).
std::vector<double> sample_widths(const std::vector<double>& grid);

double weighted_inner(const SpectralCurve& u, const SpectralCurve& v, const SpectralCurve& weight);

/// Trapezoidal ∫ a(λ)b(λ)c(λ) dλ on the shared grid.
double trapezoid_product(const SpectralCurve& a, const SpectralCurve& b, const SpectralCurve& c);

void require_same_grid(const SpectralCurve& a, const SpectralCurve& b, const char* what);

/// Top-3 principal directions of the (uncentered) database under the weight
/// w = Σ_k S^k. Each vector's sign is chosen so that Σ w u is positive.
SpectralBasis weighted_pca(std::span<const SpectralCurve> database, const CameraResponse& response,
                           SpectralRole role);

CouplingTensor compute_coupling(const SpectralBasis& refl, const SpectralBasis& illum,
                                const CameraResponse& response);

Vec3 project_spectrum(const SpectralCurve& curve, const SpectralBasis& basis);
SpectralCurve reconstruct_spectrum(const Vec3& coeff, const SpectralBasis& basis);

/// Unit-norm projection of a flat spectrum onto the illumination basis.
FlashCoefficients flash_coefficients(const SpectralBasis& illum);

/// rgb^k = ∫ S^k (B c) dλ, clamped at zero.
Vec3 coeff_to_display_rgb(const Vec3& coeff, const SpectralBasis& basis, const CameraResponse& response);

/// Everything the per-pixel stages need from the spectral side.
struct SpectralModel {
    CameraResponse response;
    SpectralBasis reflectance;
    SpectralBasis illumination;
    CouplingTensor coupling;
    FlashCoefficients flash;

    static SpectralModel from_bases(CameraResponse response, SpectralBasis refl, SpectralBasis illum);
};

}  // namespace lumisep
