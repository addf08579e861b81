#pragma once

#include <cstdint>
#include <vector>

#include "lumisep/imaging.hpp"

namespace lumisep {

struct SceneLight {
    Vec3 direction = Vec3::UnitZ();  // unit, towards the light
    Vec3 coefficients = Vec3::UnitX();  // b_i, unit-norm
    double intensity = 1.0;
};

enum class FlashMode { CollocatedDirectional, Uniform };

struct FlashSpec {
    FlashMode mode = FlashMode::CollocatedDirectional;
    double intensity = 1.0;
};

/// A fully specified Lambertian scene. Occlusion is authored per light
/// (1 = fully lit); pixels outside `mask` render black.
struct SceneSpec {
    int width = 0;
    int height = 0;
    Field<Vec3> normals;
    Field<Vec3> reflectance;  // a_p
    std::vector<SceneLight> lights;
    std::vector<Field<double>> occlusion;
    FlashSpec flash;
    Mask mask;

    /// Throws InvalidArgument on shape mismatches, non-unit vectors, or occlusion outside [0,1].
    void validate() const;
};

struct GroundTruth {
    LinearImage noflash;
    LinearImage flash;
    LinearImage pureflash;
    std::vector<LinearImage> layers;
    GammaField gamma;
    std::vector<Field<double>> shading;  // η_i(p)

    ImagePair pair() const { return ImagePair(flash, noflash); }
};

/// Forward model. η_i = intensity · occlusion · max(0, n·l_i); each channel is the
/// trapezoidal integral of max(0, B_R a)·S^k·(B_L b_i). The flash spectrum is
/// B_L f scaled by the flash intensity, with shading max(0, n·ẑ) when collocated.
/// noflash is the sum of the layers and pureflash = flash − noflash, both exactly.
GroundTruth render(const SceneSpec& scene, const SpectralModel& model);

/// Additive Gaussian noise on both images, clamped at zero.
ImagePair add_noise(const GroundTruth& truth, double sigma, std::uint64_t seed);

/// Piecewise-planar scene whose occlusion blocks guarantee regions lit by a
/// single light (and, for three lights, by each pair). The light coefficients
/// are placed around the flash direction with the requested pairwise
/// separation. Deterministic in `seed`.
SceneSpec make_pure_pixel_scene(int n, double separation_deg, int size, std::uint64_t seed,
                                const SpectralModel& model);

struct SphereScene {
    SceneSpec scene;
    Mask sphere;  // pixels on the sphere that are not masked as limb
};

/// Sphere of radius radius_fraction·size/2 on a fronto-parallel background.
/// Pixels with n_z below 0.1 are masked out as grazing.
SphereScene make_sphere_scene(const std::vector<SceneLight>& lights, double radius_fraction, int size,
                              std::uint64_t seed, const SpectralModel& model);

/// Three unit coefficients around `center` with the given pairwise angle.
std::vector<Vec3> place_coefficients(const Vec3& center, int n, double separation_deg, double azimuth);

/// Random smooth reflectance coefficients whose reconstruction is non-negative.
std::vector<Vec3> reflectance_palette(const SpectralModel& model, int count, std::uint64_t seed);

/// Σ(est − truth)² / Σ truth² over all pixels and channels.
double nmse(const LinearImage& estimate, const LinearImage& truth);

/// Per-channel variant of nmse.
Vec3 nmse_per_channel(const LinearImage& estimate, const LinearImage& truth);

}  // namespace lumisep
