#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "lumisep/apps.hpp"

namespace lumisep {

struct PipelinePaths {
    std::filesystem::path flash;
    std::filesystem::path noflash;
    std::filesystem::path pure_flash;  // optional substitute for flash − noflash
    std::filesystem::path response;
    std::filesystem::path reflectance_basis;
    std::filesystem::path illumination_basis;
    std::filesystem::path output;
};

struct PipelineConfig {
    PipelinePaths paths;
    int n = 2;
    int bins = kDefaultHistogramBins;
    std::size_t min_bin_count = kDefaultMinBinCount;
    RansacConfig ransac;
    double dark_threshold = kDefaultDarkThreshold;
    double cond_limit = kDefaultCondLimit;
    AlphaConvention alpha_convention = AlphaConvention::Normalized;

    /// Throws InvalidArgument unless N ∈ {1,2,3} and all thresholds are positive.
    void validate() const;
};

/// An Error re-raised with the name of the stage that produced it.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const Error& cause)
        : std::runtime_error("stage '" + stage + "': " + cause.what()), stage_(std::move(stage)), code_(cause.code()) {}
    const std::string& stage() const noexcept { return stage_; }
    ErrorCode code() const noexcept { return code_; }

private:
    std::string stage_;
    ErrorCode code_;
};

struct PipelineResult {
    LinearImage pureflash;
    AlphaField alpha;
    GammaField gamma;
    SphereHistogram histogram;
    PrunedSet pruned;
    SeparationResult separation;
};

/// Runs α → Γ → histogram → prune → estimate → z → layers. When `known` is
/// given the estimation stages are skipped and those coefficients are used.
PipelineResult run_pipeline(const LinearImage& noflash, const LinearImage& pureflash, const SpectralModel& model,
                            const PipelineConfig& cfg, const std::optional<LightEstimate>& known = std::nullopt);

/// Estimation only: α → Γ → histogram → prune → estimate.
LightEstimate estimate_from_images(const LinearImage& noflash, const LinearImage& pureflash,
                                   const SpectralModel& model, const PipelineConfig& cfg);

/// Contents of separation.json.
nlohmann::json separation_manifest(const PipelineResult& result, const SpectralModel& model,
                                   const PipelineConfig& cfg);

/// Writes layer PFMs and previews, shading maps and separation.json into cfg.paths.output.
void write_separation(const PipelineResult& result, const SpectralModel& model, const PipelineConfig& cfg,
                      double exposure);

}  // namespace lumisep
