#include "lumisep/hullfit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "lumisep/geometry.hpp"

namespace lumisep {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

Vec3 weighted_sum(const PrunedSet& set, const std::vector<std::size_t>& idx)
{
    Vec3 acc = Vec3::Zero();
    for (auto i : idx) acc += set.weights[i] * set.directions[i];
    return acc;
}

std::vector<std::size_t> all_indices(std::size_t n)
{
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

double weighted_median(std::vector<std::pair<double, double>> values)
{
    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (const auto& [v, w] : values) total += w;
    double acc = 0.0;
    for (const auto& [v, w] : values) {
        acc += w;
        if (acc >= 0.5 * total) return v;
    }
    return values.back().first;
}

void require_valid_set(const PrunedSet& set)
{
    if (set.empty()) throw Error(ErrorCode::EmptySet, "no directions to fit");
    if (set.weights.size() != set.directions.size()) {
        throw Error(ErrorCode::InvalidArgument, "direction and weight counts differ");
    }
}

/// Unit normal of the weighted least-squares plane through the origin.
Vec3 fit_plane_normal(const PrunedSet& set, const std::vector<std::size_t>& idx)
{
    Mat3 scatter = Mat3::Zero();
    for (auto i : idx) scatter += set.weights[i] * set.directions[i] * set.directions[i].transpose();
    Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
    return eig.eigenvectors().col(0).normalized();
}

std::vector<std::size_t> plane_inliers(const PrunedSet& set, const Vec3& normal, double band)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (std::abs(normal.dot(set.directions[i])) <= band) idx.push_back(i);
    }
    return idx;
}

double inlier_weight(const PrunedSet& set, const Vec3& normal, double band)
{
    double score = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (std::abs(normal.dot(set.directions[i])) <= band) score += set.weights[i];
    }
    return score;
}

}  // namespace

double angle_between(const Vec3& a, const Vec3& b)
{
    // atan2 form stays accurate for nearly parallel vectors.
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

SphereHistogram::SphereHistogram(int bins_per_axis) : bins(bins_per_axis)
{
    if (bins_per_axis < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin per axis");
    const auto n = static_cast<std::size_t>(bins) * bins;
    counts.assign(n, 0);
    sums.assign(n, Vec3::Zero());
}

std::size_t SphereHistogram::index_of(const Vec3& d) const
{
    const double theta = std::acos(std::clamp(d.z() / d.norm(), -1.0, 1.0));
    double phi = std::atan2(d.y(), d.x());
    if (phi < 0) phi += 2 * kPi;
    int row = std::min(bins - 1, static_cast<int>(theta / kPi * bins));
    int col = static_cast<int>(phi / (2 * kPi) * bins);
    col = std::clamp(col, 0, bins - 1);
    return static_cast<std::size_t>(row) * bins + col;
}

void SphereHistogram::add(const Vec3& d)
{
    const auto i = index_of(d);
    counts[i] += 1;
    sums[i] += d;
}

void SphereHistogram::merge(const SphereHistogram& other)
{
    if (other.bins != bins) throw Error(ErrorCode::DimensionMismatch, "histogram resolutions differ");
    for (std::size_t i = 0; i < counts.size(); ++i) {
        counts[i] += other.counts[i];
        sums[i] += other.sums[i];
    }
}

Vec3 SphereHistogram::mean(std::size_t i) const
{
    const double n = sums[i].norm();
    return n > 0 ? Vec3(sums[i] / n) : Vec3::Zero();
}

std::size_t SphereHistogram::total() const
{
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t SphereHistogram::occupied() const
{
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
}

SphereHistogram build_histogram(const GammaField& gamma, int bins_per_axis)
{
    SphereHistogram hist(bins_per_axis);
    for (std::size_t i = 0; i < gamma.gamma.size(); ++i) {
        if (gamma.mask[i]) hist.add(gamma.gamma[i]);
    }
    if (hist.total() == 0) throw Error(ErrorCode::EmptyField, "no valid Γ pixels");
    return hist;
}

SphereHistogram build_histogram(std::span<const Vec3> directions, int bins_per_axis)
{
    if (directions.empty()) throw Error(ErrorCode::EmptyField, "no directions");
    SphereHistogram hist(bins_per_axis);
    for (const auto& d : directions) hist.add(d);
    return hist;
}

PrunedSet prune(const SphereHistogram& hist, std::size_t min_count)
{
    PrunedSet set;
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        if (hist.counts[i] > 0 && hist.counts[i] >= min_count) {
            set.directions.push_back(hist.mean(i));
            set.weights.push_back(static_cast<double>(hist.counts[i]));
        }
    }
    if (set.empty()) {
        throw Error(ErrorCode::AllPruned,
                    "no histogram bin holds " + std::to_string(min_count) + " or more pixels");
    }
    return set;
}

void validate_lights(const LightEstimate& lights)
{
    const int n = lights.count();
    if (n < 1 || n > 3) throw Error(ErrorCode::DegenerateLights, "light count must be 1, 2 or 3");
    for (const auto& b : lights.coefficients) {
        if (!b.allFinite() || std::abs(b.norm() - 1.0) > 1e-9) {
            throw Error(ErrorCode::DegenerateLights, "light coefficients must be unit-norm");
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (angle_between(lights.coefficients[i], lights.coefficients[j]) <= 0.1 * kDeg) {
                throw Error(ErrorCode::DegenerateLights, "two estimated lights are within 0.1°");
            }
        }
    }
}

LightEstimate estimate_one(const PrunedSet& set)
{
    require_valid_set(set);
    std::vector<std::size_t> active = all_indices(set.size());
    Vec3 sum = weighted_sum(set, active);
    if (!(sum.norm() > 0)) throw Error(ErrorCode::CentroidDegenerate, "weighted mean vanishes");
    Vec3 mean = sum.normalized();

    for (int iter = 0; iter < 20; ++iter) {
        std::vector<std::pair<double, double>> devs;
        devs.reserve(set.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            devs.emplace_back(angle_between(set.directions[i], mean), set.weights[i]);
        }
        const double cutoff = 3.0 * weighted_median(devs);
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (devs[i].first <= cutoff) keep.push_back(i);
        }
        const Vec3 s = weighted_sum(set, keep);
        if (!(s.norm() > 0)) break;
        const Vec3 next = s.normalized();
        const bool converged = angle_between(next, mean) < 1e-8 && keep == active;
        mean = next;
        active = std::move(keep);
        if (converged) break;
    }
    LightEstimate est;
    est.coefficients = {mean};
    est.method = "robust-mean";
    return est;
}

LightEstimate estimate_two(const PrunedSet& set, const RansacConfig& cfg)
{
    require_valid_set(set);
    if (cfg.iterations < 1 || !(cfg.inlier_angle_deg > 0)) {
        throw Error(ErrorCode::InvalidArgument, "RANSAC needs positive iterations and inlier band");
    }
    const std::size_t n = set.size();
    double spread = 0.0;
    for (std::size_t i = 1; i < n; ++i) spread = std::max(spread, angle_between(set.directions[0], set.directions[i]));
    if (spread < 1e-6) throw Error(ErrorCode::ArcDegenerate, "all directions coincide");

    const double band = std::sin(cfg.inlier_angle_deg * kDeg);
    double best_score = -1.0;
    Vec3 best_normal = Vec3::Zero();
    auto try_pair = [&](std::size_t i, std::size_t j) {
        const Vec3 c = set.directions[i].cross(set.directions[j]);
        if (c.norm() < 1e-9) return;
        const Vec3 normal = c.normalized();
        const double score = inlier_weight(set, normal, band);
        if (score > best_score) {
            best_score = score;
            best_normal = normal;
        }
    };

    // Small sets are searched exhaustively; the sampled search would only revisit the same pairs.
    if (n * (n - 1) / 2 <= static_cast<std::size_t>(cfg.iterations)) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) try_pair(i, j);
        }
    } else {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (int it = 0; it < cfg.iterations; ++it) {
            const std::size_t i = pick(rng);
            std::size_t j = pick(rng);
            if (i == j) continue;
            try_pair(i, j);
        }
    }
    if (best_score < 0) throw Error(ErrorCode::ArcDegenerate, "no sampled pair defines a great circle");

    Vec3 normal = best_normal;
    std::vector<std::size_t> inliers = plane_inliers(set, normal, band);
    for (int round = 0; round < 2; ++round) {
        const Vec3 refit = fit_plane_normal(set, inliers);
        auto refit_inliers = plane_inliers(set, refit, band);
        if (refit_inliers.size() < 2) break;
        normal = refit;
        inliers = std::move(refit_inliers);
    }

    std::vector<Vec3> onto(inliers.size());
    Vec3 ref = Vec3::Zero();
    for (std::size_t k = 0; k < inliers.size(); ++k) {
        const Vec3& d = set.directions[inliers[k]];
        onto[k] = (d - normal.dot(d) * normal).normalized();
        ref += set.weights[inliers[k]] * onto[k];
    }
    ref = ref.norm() > 0 ? Vec3(ref.normalized()) : onto.front();
    const Vec3 tangent = normal.cross(ref);
    std::size_t lo = 0;
    std::size_t hi = 0;
    double lo_angle = std::numeric_limits<double>::infinity();
    double hi_angle = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < onto.size(); ++k) {
        const double a = std::atan2(tangent.dot(onto[k]), ref.dot(onto[k]));
        if (a < lo_angle) {
            lo_angle = a;
            lo = k;
        }
        if (a > hi_angle) {
            hi_angle = a;
            hi = k;
        }
    }
    if (lo == hi) throw Error(ErrorCode::ArcDegenerate, "arc has a single inlier");

    LightEstimate est;
    est.coefficients = {onto[lo], onto[hi]};
    est.method = "ransac-arc";
    est.seed = cfg.seed;
    validate_lights(est);
    return est;
}

TangentFrame tangent_frame(const Vec3& center)
{
    TangentFrame f;
    f.center = center.normalized();
    Vec3 helper = Vec3::UnitX();
    const Vec3 a = f.center.cwiseAbs();
    if (a.y() <= a.x() && a.y() <= a.z()) helper = Vec3::UnitY();
    else if (a.z() <= a.x() && a.z() <= a.y()) helper = Vec3::UnitZ();
    f.u = helper.cross(f.center).normalized();
    f.v = f.center.cross(f.u);
    return f;
}

Vec2 gnomonic_project(const Vec3& d, const TangentFrame& frame)
{
    const double depth = d.dot(frame.center);
    if (!(depth > 1e-6)) throw Error(ErrorCode::BehindTangentPlane, "direction is not in the tangent hemisphere");
    return {d.dot(frame.u) / depth, d.dot(frame.v) / depth};
}

Vec3 gnomonic_unproject(const Vec2& p, const TangentFrame& frame)
{
    return (frame.center + p.x() * frame.u + p.y() * frame.v).normalized();
}

LightEstimate estimate_three(const PrunedSet& set)
{
    require_valid_set(set);
    double total = 0.0;
    for (double w : set.weights) total += w;
    const Vec3 sum = weighted_sum(set, all_indices(set.size()));
    if (!(sum.norm() > 1e-12 * total)) throw Error(ErrorCode::CentroidDegenerate, "weighted mean vanishes");
    const TangentFrame frame = tangent_frame(sum.normalized());

    std::vector<Vec2> projected;
    projected.reserve(set.size());
    // Directions outside the centroid's open hemisphere have no gnomonic image;
    // they cannot lie in a cone that the centroid sits inside of, so skip them.
    for (const auto& d : set.directions) {
        if (d.dot(frame.center) > 1e-6) projected.push_back(gnomonic_project(d, frame));
    }
    if (projected.size() < 3) throw Error(ErrorCode::CollinearSet, "fewer than three directions near the centroid");

    std::vector<Vec2> hull;
    try {
        hull = convex_hull_2d(projected);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::AllCollinear) {
            throw Error(ErrorCode::CollinearSet, "projected directions are collinear; the scene suggests N <= 2");
        }
        throw;
    }
    if (!(polygon_area(hull) > 1e-12)) {
        throw Error(ErrorCode::CollinearSet, "projected hull has no area; the scene suggests N <= 2");
    }
    const Triangle2 tri = min_area_enclosing_triangle(hull);

    LightEstimate est;
    for (const auto& corner : tri.vertices) est.coefficients.push_back(gnomonic_unproject(corner, frame));
    est.method = "min-area-triangle";
    validate_lights(est);
    return est;
}

LightEstimate estimate_lights(const PrunedSet& set, int n, const RansacConfig& cfg)
{
    switch (n) {
    case 1: return estimate_one(set);
    case 2: return estimate_two(set, cfg);
    case 3: return estimate_three(set);
    default: throw Error(ErrorCode::InvalidCount, "number of lights must be 1, 2 or 3");
    }
}

}  // namespace lumisep
