#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lumisep/imaging.hpp"

namespace lumisep {

double angle_between(const Vec3& a, const Vec3& b);

/// Equirectangular histogram over S²: θ = acos(z) ∈ [0, π] split into `bins`
/// rows, φ = atan2(y, x) ∈ [0, 2π) split into `bins` columns.
struct SphereHistogram {
    int bins = 0;
    std::vector<std::size_t> counts;
    std::vector<Vec3> sums;

    explicit SphereHistogram(int bins_per_axis = 100);

    std::size_t index_of(const Vec3& d) const;
    void add(const Vec3& d);
    void merge(const SphereHistogram& other);
    /// Normalized vector sum of the directions in bin i.
    Vec3 mean(std::size_t i) const;
    std::size_t total() const;
    std::size_t occupied() const;
};

inline constexpr int kDefaultHistogramBins = 100;
inline constexpr std::size_t kDefaultMinBinCount = 100;

SphereHistogram build_histogram(const GammaField& gamma, int bins_per_axis = kDefaultHistogramBins);
SphereHistogram build_histogram(std::span<const Vec3> directions, int bins_per_axis = kDefaultHistogramBins);

/// Surviving bin means, weighted by their pixel counts.
struct PrunedSet {
    std::vector<Vec3> directions;
    std::vector<double> weights;

    std::size_t size() const { return directions.size(); }
    bool empty() const { return directions.empty(); }
};

/// Keeps bins holding at least min_count directions. Throws AllPruned if none do.
PrunedSet prune(const SphereHistogram& hist, std::size_t min_count = kDefaultMinBinCount);

struct LightEstimate {
    std::vector<Vec3> coefficients;
    std::string method;
    std::optional<std::uint64_t> seed;

    int count() const { return static_cast<int>(coefficients.size()); }
};

/// Throws DegenerateLights unless 1 ≤ N ≤ 3, every coefficient is unit-norm
/// and every pair is more than 0.1° apart.
void validate_lights(const LightEstimate& lights);

/// Iterative trimmed weighted spherical mean.
LightEstimate estimate_one(const PrunedSet& set);

struct RansacConfig {
    double inlier_angle_deg = 1.0;
    int iterations = 500;
    std::uint64_t seed = 7;
};

/// Great-circle RANSAC, weighted plane refit, and the extreme inlier
/// projections along the fitted circle as the two arc endpoints.
LightEstimate estimate_two(const PrunedSet& set, const RansacConfig& cfg = {});

/// Gnomonic projection about the weighted centroid, planar convex hull,
/// minimum-area enclosing triangle, and back-projection of its corners.
LightEstimate estimate_three(const PrunedSet& set);

LightEstimate estimate_lights(const PrunedSet& set, int n, const RansacConfig& cfg = {});

/// Orthonormal (u, v) spanning the tangent plane at a unit center.
struct TangentFrame {
    Vec3 center;
    Vec3 u;
    Vec3 v;
};

TangentFrame tangent_frame(const Vec3& center);
Vec2 gnomonic_project(const Vec3& d, const TangentFrame& frame);
Vec3 gnomonic_unproject(const Vec2& p, const TangentFrame& frame);
inline Vec2 gnomonic_project(const Vec3& d, const Vec3& center) { return gnomonic_project(d, tangent_frame(center)); }
inline Vec3 gnomonic_unproject(const Vec2& p, const Vec3& center) { return gnomonic_unproject(p, tangent_frame(center)); }

}  // namespace lumisep
