#include "lumisep/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "lumisep/io.hpp"

namespace lumisep {

void PipelineConfig::validate() const
{
    if (n < 1 || n > 3) throw Error(ErrorCode::InvalidCount, "N must be 1, 2 or 3");
    if (bins <= 0) throw Error(ErrorCode::InvalidArgument, "histogram bins must be positive");
    if (min_bin_count == 0) throw Error(ErrorCode::InvalidArgument, "minimum bin count must be positive");
    if (!(dark_threshold > 0) || !(cond_limit > 0)) throw Error(ErrorCode::InvalidArgument, "thresholds must be positive");
    if (!(ransac.inlier_angle_deg > 0) || ransac.iterations <= 0) {
        throw Error(ErrorCode::InvalidArgument, "RANSAC threshold and iterations must be positive");
    }
}

namespace {

template <class F>
auto stage(const char* name, F&& fn)
{
    try {
        return fn();
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

}  // namespace

PipelineResult run_pipeline(const LinearImage& noflash, const LinearImage& pureflash, const SpectralModel& model,
                            const PipelineConfig& cfg, const std::optional<LightEstimate>& known)
{
    stage("config", [&] { cfg.validate(); return 0; });
    stage("input", [&] {
        noflash.validate();
        pureflash.validate();
        if (!noflash.same_shape(pureflash)) throw Error(ErrorCode::DimensionMismatch, "image sizes differ");
        return 0;
    });
    PipelineResult r;
    r.pureflash = pureflash;
    r.alpha = stage("alpha", [&] {
        return solve_alpha(pureflash, model.coupling, model.flash, cfg.dark_threshold);
    });
    r.gamma = stage("gamma", [&] { return solve_beta_gamma(noflash, r.alpha, model.coupling, cfg.cond_limit); });
    LightEstimate lights;
    if (known) {
        lights = *known;
        stage("lights", [&] { validate_lights(lights); return 0; });
        if (lights.count() != cfg.n) {
            throw StageError("lights", Error(ErrorCode::CountMismatch, "supplied lights do not match N"));
        }
    } else {
        r.histogram = stage("histogram", [&] { return build_histogram(r.gamma, cfg.bins); });
        r.pruned = stage("prune", [&] { return prune(r.histogram, cfg.min_bin_count); });
        lights = stage("estimate", [&] { return estimate_lights(r.pruned, cfg.n, cfg.ransac); });
    }
    auto shading = stage("shading", [&] { return relative_shading(r.gamma, lights); });
    r.separation = stage("layers", [&] {
        return separate_images(noflash, r.alpha, r.gamma, shading, lights, model.coupling, cfg.alpha_convention);
    });
    return r;
}

LightEstimate estimate_from_images(const LinearImage& noflash, const LinearImage& pureflash,
                                   const SpectralModel& model, const PipelineConfig& cfg)
{
    stage("config", [&] { cfg.validate(); return 0; });
    auto alpha = stage("alpha", [&] { return solve_alpha(pureflash, model.coupling, model.flash, cfg.dark_threshold); });
    auto gamma = stage("gamma", [&] { return solve_beta_gamma(noflash, alpha, model.coupling, cfg.cond_limit); });
    auto hist = stage("histogram", [&] { return build_histogram(gamma, cfg.bins); });
    auto pruned = stage("prune", [&] { return prune(hist, cfg.min_bin_count); });
    return stage("estimate", [&] { return estimate_lights(pruned, cfg.n, cfg.ransac); });
}

nlohmann::json separation_manifest(const PipelineResult& result, const SpectralModel& model,
                                   const PipelineConfig& cfg)
{
    const auto& sep = result.separation;
    const auto& sh = sep.shading;
    nlohmann::json j;
    j["format"] = "lumisep-separation-1";
    j["width"] = sep.mask.width;
    j["height"] = sep.mask.height;
    j["n"] = sep.lights.count();
    j["lights"] = lights_to_json(sep.lights);
    j["light_rgb"] = nlohmann::json::array();
    for (const auto& b : sep.lights.coefficients) {
        j["light_rgb"].push_back(vec_to_json(coeff_to_display_rgb(b, model.illumination, model.response)));
    }
    j["layers"] = nlohmann::json::array();
    for (int i = 0; i < sep.lights.count(); ++i) j["layers"].push_back("sep_" + std::to_string(i) + ".pfm");

    std::vector<double> res;
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < sh.mask.size(); ++i) {
        if (!sh.mask[i]) continue;
        res.push_back(sh.residual[i]);
        flagged += sh.flagged[i];
    }
    j["mask"] = {{"total_pixels", sep.mask.size()},
                 {"valid_pixels", count_valid(sep.mask)},
                 {"alpha_valid_pixels", count_valid(result.alpha.mask)},
                 {"gamma_valid_pixels", count_valid(result.gamma.mask)},
                 {"flagged_pixels", flagged}};
    nlohmann::json rs = {{"mean", 0.0}, {"max", 0.0}, {"p95", 0.0}, {"flag_threshold", kResidualFlagThreshold}};
    if (!res.empty()) {
        double sum = 0.0;
        for (double v : res) sum += v;
        rs["mean"] = sum / static_cast<double>(res.size());
        rs["max"] = *std::max_element(res.begin(), res.end());
        const std::size_t k = static_cast<std::size_t>(std::floor(0.95 * static_cast<double>(res.size() - 1)));
        std::nth_element(res.begin(), res.begin() + static_cast<std::ptrdiff_t>(k), res.end());
        rs["p95"] = res[k];
    }
    j["residual"] = rs;
    j["histogram"] = {{"bins", cfg.bins},
                      {"min_bin_count", cfg.min_bin_count},
                      {"occupied_bins", result.histogram.counts.empty() ? 0 : result.histogram.occupied()},
                      {"surviving_bins", result.pruned.size()}};
    j["alpha_convention"] = cfg.alpha_convention == AlphaConvention::Normalized ? "normalized" : "unnormalized";
    j["config"] = {{"dark_threshold", cfg.dark_threshold},
                   {"cond_limit", cfg.cond_limit},
                   {"ransac", {{"inlier_angle_deg", cfg.ransac.inlier_angle_deg},
                               {"iterations", cfg.ransac.iterations},
                               {"seed", cfg.ransac.seed}}},
                   {"pure_flash_supplied", !cfg.paths.pure_flash.empty()}};
    return j;
}

void write_separation(const PipelineResult& result, const SpectralModel& model, const PipelineConfig& cfg,
                      double exposure)
{
    const auto& out = cfg.paths.output;
    std::filesystem::create_directories(out);
    const auto& sep = result.separation;
    LinearImage sum(sep.mask.width, sep.mask.height);
    for (int i = 0; i < sep.lights.count(); ++i) {
        const std::string stem = "sep_" + std::to_string(i);
        write_pfm(sep.layers[i], out / (stem + ".pfm"));
        write_preview_png(sep.layers[i], out / (stem + ".png"), exposure);
        sum = sum + sep.layers[i];
    }
    write_preview_png(sum, out / "layers_sum.png", exposure);
    write_preview_png(result.pureflash, out / "pureflash.png", exposure);
    const auto shading = shading_images(result.gamma, sep.shading);
    for (std::size_t i = 0; i < shading.size(); ++i) write_pfm(shading[i], out / ("shading_" + std::to_string(i) + ".pfm"));
    write_pfm(result.gamma.gamma, out / "gamma.pfm");
    write_json(separation_manifest(result, model, cfg), out / "separation.json");
}

}  // namespace lumisep
