#pragma once

#include <cmath>
#include <vector>

#include "lumisep/io.hpp"
#include "lumisep/pipeline.hpp"
#include "lumisep/synth.hpp"
#include "oracles.hpp"

namespace support {

using namespace lumisep;

inline const SpectralModel& model()
{
    static const SpectralModel m = load_default_model();
    return m;
}

inline std::vector<Vec3> truth_coefficients(const SceneSpec& scene)
{
    std::vector<Vec3> out;
    for (const auto& l : scene.lights) out.push_back(l.coefficients);
    return out;
}

inline double deg(double rad) { return rad * 180.0 / M_PI; }

/// Per-light NMSE after matching estimated lights to true lights.
inline std::vector<double> layer_nmse(const PipelineResult& r, const GroundTruth& truth, const SceneSpec& scene)
{
    std::vector<int> perm;
    oracle::matched_angles_deg(r.separation.lights.coefficients, truth_coefficients(scene), &perm);
    std::vector<double> out;
    for (std::size_t i = 0; i < truth.layers.size(); ++i) out.push_back(nmse(r.separation.layers[perm[i]], truth.layers[i]));
    return out;
}

/// Largest relative deviation of Σ layers from the no-flash image over valid
/// pixels whose cone-fit residual is zero.
inline double reconstruction_gap(const PipelineResult& r, const LinearImage& noflash, std::size_t* checked = nullptr)
{
    const auto& sep = r.separation;
    double worst = 0.0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < noflash.pixel_count(); ++p) {
        if (!sep.mask[p] || sep.shading.residual[p] > kZeroResidual) continue;
        Vec3 sum = Vec3::Zero();
        for (const auto& layer : sep.layers) sum += layer.pixel(p);
        const Vec3 nf = noflash.pixel(p);
        if (nf.norm() == 0) continue;
        worst = std::max(worst, (sum - nf).norm() / nf.norm());
        ++n;
    }
    if (checked) *checked = n;
    return worst;
}

}  // namespace support
