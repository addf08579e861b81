#include "lumisep/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "lumisep/hullfit.hpp"
#include "lumisep/parallel.hpp"

namespace lumisep {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

bool unit(const Vec3& v) { return v.allFinite() && std::abs(v.norm() - 1.0) < 1e-9; }

std::vector<double> trapezoid_weights(const std::vector<double>& grid)
{
    std::vector<double> w(grid.size(), 0.0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double h = grid[i + 1] - grid[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

/// S^k(λ)·ℓ(λ)·(trapezoid weight) for each channel, so a channel value is a dot product with ρ.
std::array<std::vector<double>, 3> channel_kernels(const SpectralModel& model, const Vec3& coeffs, double scale)
{
    const SpectralCurve spd = reconstruct_spectrum(coeffs, model.illumination);
    const auto tw = trapezoid_weights(spd.wavelengths());
    std::array<std::vector<double>, 3> out;
    for (int k = 0; k < 3; ++k) {
        out[k].resize(spd.size());
        for (std::size_t s = 0; s < spd.size(); ++s) {
            out[k][s] = scale * model.response.channels[k][s] * spd[s] * tw[s];
        }
    }
    return out;
}

Vec3 integrate(const std::vector<double>& rho, const std::array<std::vector<double>, 3>& kernels)
{
    Vec3 rgb = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for (std::size_t s = 0; s < rho.size(); ++s) acc += rho[s] * kernels[k][s];
        rgb[k] = acc;
    }
    return rgb;
}

double spectrum_min(const Vec3& coeffs, const SpectralBasis& basis)
{
    const auto v = reconstruct_spectrum(coeffs, basis).values();
    return *std::min_element(v.begin(), v.end());
}

double spectrum_max(const Vec3& coeffs, const SpectralBasis& basis)
{
    const auto v = reconstruct_spectrum(coeffs, basis).values();
    return *std::max_element(v.begin(), v.end());
}

Vec3 tilted(double polar_deg, double azimuth_deg)
{
    const double t = polar_deg * kDeg;
    const double p = azimuth_deg * kDeg;
    return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
}

}  // namespace

void SceneSpec::validate() const
{
    if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "scene must be non-empty");
    if (normals.width != width || normals.height != height || reflectance.width != width ||
        reflectance.height != height || mask.width != width || mask.height != height) {
        throw Error(ErrorCode::DimensionMismatch, "scene maps differ in size");
    }
    if (occlusion.size() != lights.size()) {
        throw Error(ErrorCode::CountMismatch, "one occlusion map per light");
    }
    for (const auto& l : lights) {
        if (!unit(l.direction) || !unit(l.coefficients) || !(l.intensity >= 0)) {
            throw Error(ErrorCode::InvalidArgument, "scene lights need unit direction/coefficients and intensity >= 0");
        }
    }
    for (const auto& occ : occlusion) {
        if (occ.width != width || occ.height != height) throw Error(ErrorCode::DimensionMismatch, "occlusion size");
        for (double v : occ.values) {
            if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidArgument, "occlusion outside [0,1]");
        }
    }
    if (!(flash.intensity >= 0)) throw Error(ErrorCode::InvalidArgument, "flash intensity must be >= 0");
}

GroundTruth render(const SceneSpec& scene, const SpectralModel& model)
{
    scene.validate();
    const auto& grid = model.response.grid();
    require_same_grid(model.reflectance.vectors[0], model.response.channels[0], "render: reflectance basis");
    require_same_grid(model.illumination.vectors[0], model.response.channels[0], "render: illumination basis");

    const int w = scene.width;
    const int h = scene.height;
    const std::size_t n = scene.lights.size();
    std::vector<std::array<std::vector<double>, 3>> light_kernels;
    for (const auto& l : scene.lights) light_kernels.push_back(channel_kernels(model, l.coefficients, 1.0));
    const auto flash_kernels = channel_kernels(model, model.flash.f, 1.0);

    GroundTruth gt;
    gt.layers.assign(n, LinearImage(w, h));
    gt.shading.assign(n, Field<double>(w, h, 0.0));
    gt.noflash = LinearImage(w, h);
    gt.flash = LinearImage(w, h);
    gt.pureflash = LinearImage(w, h);
    gt.gamma = GammaField{Field<Vec3>(w, h, Vec3::Zero()), Field<double>(w, h, 0.0), Mask(w, h, 0)};

    parallel_rows(h, [&](int y0, int y1) {
        std::vector<double> rho(grid.size());
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!scene.mask.at(x, y)) continue;
                const Vec3& a = scene.reflectance.at(x, y);
                const Vec3& normal = scene.normals.at(x, y);
                for (std::size_t s = 0; s < grid.size(); ++s) {
                    double v = 0.0;
                    for (int i = 0; i < 3; ++i) v += a[i] * model.reflectance.vectors[i][s];
                    rho[s] = std::max(0.0, v);
                }
                Vec3 sum = Vec3::Zero();
                Vec3 beta = Vec3::Zero();
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& light = scene.lights[i];
                    const double eta =
                        light.intensity * scene.occlusion[i].at(x, y) * std::max(0.0, normal.dot(light.direction));
                    gt.shading[i].at(x, y) = eta;
                    const Vec3 layer = eta * integrate(rho, light_kernels[i]);
                    gt.layers[i].set_pixel(x, y, layer);
                    sum += layer;
                    beta += eta * light.coefficients;
                }
                gt.noflash.set_pixel(x, y, sum);

                double eta_f = scene.flash.intensity;
                if (scene.flash.mode == FlashMode::CollocatedDirectional) eta_f *= std::max(0.0, normal.z());
                const Vec3 flash = sum + eta_f * integrate(rho, flash_kernels);
                gt.flash.set_pixel(x, y, flash);
                gt.pureflash.set_pixel(x, y, flash - sum);

                beta *= a.norm();
                const double bn = beta.norm();
                if (bn > 0.0) {
                    gt.gamma.gamma.at(x, y) = beta / bn;
                    gt.gamma.beta_norm.at(x, y) = bn;
                    gt.gamma.mask.at(x, y) = 1;
                }
            }
        }
    });
    return gt;
}

ImagePair add_noise(const GroundTruth& truth, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0)) throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    LinearImage nf = truth.noflash;
    LinearImage f = truth.flash;
    for (double& v : nf.data()) v = std::max(0.0, v + (sigma > 0 ? noise(rng) : 0.0));
    for (double& v : f.data()) v = std::max(0.0, v + (sigma > 0 ? noise(rng) : 0.0));
    return ImagePair(std::move(f), std::move(nf));
}

std::vector<Vec3> place_coefficients(const Vec3& center, int n, double separation_deg, double azimuth)
{
    const TangentFrame frame = tangent_frame(center);
    const double sep = separation_deg * kDeg;
    std::vector<Vec3> out;
    switch (n) {
    case 1: out.push_back(frame.center); break;
    case 2: {
        const Vec3 axis = std::cos(azimuth) * frame.u + std::sin(azimuth) * frame.v;
        for (double sign : {-1.0, 1.0}) {
            out.push_back((std::cos(0.5 * sep) * frame.center + sign * std::sin(0.5 * sep) * axis).normalized());
        }
        break;
    }
    case 3: {
        // Equilateral spherical triangle: cos(sep) = 1 − 1.5 sin²r for circumradius r.
        const double radius = std::asin(std::sqrt((1.0 - std::cos(sep)) / 1.5));
        for (int k = 0; k < 3; ++k) {
            const double phi = azimuth + 2.0 * std::numbers::pi * k / 3.0;
            const Vec3 dir = std::cos(phi) * frame.u + std::sin(phi) * frame.v;
            out.push_back((std::cos(radius) * frame.center + std::sin(radius) * dir).normalized());
        }
        break;
    }
    default: throw Error(ErrorCode::InvalidCount, "light count must be 1, 2 or 3");
    }
    return out;
}

std::vector<Vec3> reflectance_palette(const SpectralModel& model, int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    const auto& grid = model.reflectance.grid();
    const Vec3 gray = project_spectrum(SpectralCurve::constant(grid, 0.5), model.reflectance);
    std::vector<Vec3> out;
    for (int c = 0; c < count; ++c) {
        Vec3 chosen = gray;
        for (int attempt = 0; attempt < 200; ++attempt) {
            // Smooth curve: offset plus two Gaussian bumps.
            const double base = 0.05 + 0.3 * unit01(rng);
            std::vector<double> v(grid.size(), base);
            for (int bump = 0; bump < 2; ++bump) {
                const double mu = 400.0 + 300.0 * unit01(rng);
                const double sd = 30.0 + 60.0 * unit01(rng);
                const double amp = 0.6 * unit01(rng);
                for (std::size_t s = 0; s < grid.size(); ++s) {
                    v[s] += amp * std::exp(-0.5 * std::pow((grid[s] - mu) / sd, 2));
                }
            }
            for (double& x : v) x = std::min(x, 0.95);
            const Vec3 a = project_spectrum(SpectralCurve(grid, v), model.reflectance);
            const double lo = spectrum_min(a, model.reflectance);
            const double hi = spectrum_max(a, model.reflectance);
            if (lo >= 0.01 && hi <= 1.0) {
                chosen = a;
                break;
            }
        }
        out.push_back(chosen);
    }
    return out;
}

SceneSpec make_pure_pixel_scene(int n, double separation_deg, int size, std::uint64_t seed,
                                const SpectralModel& model)
{
    if (n < 1 || n > 3) throw Error(ErrorCode::InvalidCount, "light count must be 1, 2 or 3");
    if (!(separation_deg > 0) && n > 1) throw Error(ErrorCode::InvalidArgument, "separation must be positive");
    if (size < 8) throw Error(ErrorCode::InvalidArgument, "scene size must be at least 8 pixels");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit01(0.0, 1.0);

    // Light coefficients: around a center near the flash direction, rotated
    // until every light spectrum is non-negative.
    std::vector<Vec3> coeffs;
    for (int attempt = 0; attempt < 64 && coeffs.empty(); ++attempt) {
        const TangentFrame f = tangent_frame(model.flash.f);
        const double tilt = (attempt < 48 ? 8.0 : 0.0) * kDeg * unit01(rng);
        const double dir = 2 * std::numbers::pi * unit01(rng);
        const Vec3 center =
            (std::cos(tilt) * f.center + std::sin(tilt) * (std::cos(dir) * f.u + std::sin(dir) * f.v)).normalized();
        auto candidate = place_coefficients(center, n, separation_deg, 2 * std::numbers::pi * unit01(rng));
        bool ok = true;
        for (const auto& b : candidate) ok = ok && spectrum_min(b, model.illumination) >= 0.0;
        if (ok) coeffs = std::move(candidate);
    }
    if (coeffs.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no non-negative light spectra at this separation");
    }

    SceneSpec scene;
    scene.width = size;
    scene.height = size;
    scene.mask = Mask(size, size, 1);
    scene.normals = Field<Vec3>(size, size, Vec3::UnitZ());
    scene.reflectance = Field<Vec3>(size, size, Vec3::Zero());
    scene.flash = FlashSpec{FlashMode::CollocatedDirectional, 1.0};

    std::vector<Vec3> directions;
    if (n == 1) directions = {tilted(20, 30)};
    if (n == 2) directions = {tilted(40, 0), tilted(40, 180)};
    if (n == 3) directions = {tilted(40, 0), tilted(40, 120), tilted(40, 240)};
    for (int i = 0; i < n; ++i) scene.lights.push_back(SceneLight{directions[i], coeffs[i], 1.0});

    // Geometry: 8×8 grid of tilted planes with a gentle ripple.
    const int tiles = 8;
    const int tile = (size + tiles - 1) / tiles;
    std::vector<Vec2> slopes(tiles * tiles);
    for (auto& s : slopes) {
        const double t = std::tan(25.0 * kDeg * std::sqrt(unit01(rng)));
        const double p = 2 * std::numbers::pi * unit01(rng);
        s = Vec2(t * std::cos(p), t * std::sin(p));
    }
    const double fx = 2 * std::numbers::pi / (5.0 + 6.0 * unit01(rng));
    const double fy = 2 * std::numbers::pi / (5.0 + 6.0 * unit01(rng));

    // Reflectance: independent 4×4-pixel patches from a small palette.
    const auto palette = reflectance_palette(model, 16, seed ^ 0x9e3779b97f4a7c15ULL);
    const int patch = std::max(1, size / 64);
    const int patches = (size + patch - 1) / patch;
    std::vector<int> patch_color(static_cast<std::size_t>(patches) * patches);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(palette.size()) - 1);
    for (auto& c : patch_color) c = pick(rng);

    // Occlusion: every tile is lit by one subset of the lights.
    std::vector<std::pair<unsigned, double>> shares;
    if (n == 1) shares = {{1u, 1.0}};
    if (n == 2) shares = {{1u, 0.2}, {2u, 0.2}, {3u, 0.6}};
    if (n == 3) shares = {{1u, 0.12}, {2u, 0.12}, {4u, 0.12}, {3u, 0.12}, {5u, 0.12}, {6u, 0.12}, {7u, 0.28}};
    std::vector<unsigned> tile_subset;
    for (const auto& [subset, share] : shares) {
        const int count = std::max(2, static_cast<int>(std::lround(share * tiles * tiles)));
        tile_subset.insert(tile_subset.end(), count, subset);
    }
    tile_subset.resize(tiles * tiles, (1u << n) - 1);
    std::shuffle(tile_subset.begin(), tile_subset.end(), rng);

    scene.occlusion.assign(n, Field<double>(size, size, 0.0));
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const int t = std::min(tiles - 1, y / tile) * tiles + std::min(tiles - 1, x / tile);
            const Vec2 g = slopes[t] + 0.12 * Vec2(std::sin(fx * x), std::cos(fy * y));
            scene.normals.at(x, y) = Vec3(-g.x(), -g.y(), 1.0).normalized();
            scene.reflectance.at(x, y) = palette[patch_color[(y / patch) * patches + x / patch]];
            for (int i = 0; i < n; ++i) {
                scene.occlusion[i].at(x, y) = (tile_subset[t] >> i) & 1u ? 1.0 : 0.0;
            }
        }
    }
    return scene;
}

SphereScene make_sphere_scene(const std::vector<SceneLight>& lights, double radius_fraction, int size,
                              std::uint64_t seed, const SpectralModel& model)
{
    if (lights.size() != 3) throw Error(ErrorCode::InvalidCount, "sphere scene takes three lights");
    Mat3 dirs;
    for (int i = 0; i < 3; ++i) dirs.row(i) = lights[i].direction.transpose();
    Eigen::JacobiSVD<Mat3> svd(dirs);
    if (!(svd.singularValues().minCoeff() > 1e-3)) {
        throw Error(ErrorCode::DegenerateDirections, "sphere lights must be linearly independent");
    }
    if (!(radius_fraction > 0 && radius_fraction <= 1)) {
        throw Error(ErrorCode::InvalidArgument, "radius fraction must be in (0, 1]");
    }

    SphereScene out;
    SceneSpec& scene = out.scene;
    scene.width = size;
    scene.height = size;
    scene.lights = lights;
    scene.normals = Field<Vec3>(size, size, Vec3::UnitZ());
    scene.reflectance = Field<Vec3>(size, size, Vec3::Zero());
    scene.mask = Mask(size, size, 1);
    scene.occlusion.assign(3, Field<double>(size, size, 1.0));
    scene.flash = FlashSpec{FlashMode::CollocatedDirectional, 1.0};
    out.sphere = Mask(size, size, 0);

    const auto palette = reflectance_palette(model, 8, seed);
    const double radius = radius_fraction * 0.5 * size;
    const double cx = 0.5 * size;
    const double cy = 0.5 * size;
    const int patch = std::max(2, size / 16);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const int color = ((x / patch) * 7 + (y / patch) * 3) % static_cast<int>(palette.size());
            scene.reflectance.at(x, y) = palette[color];
            const double u = (x + 0.5 - cx) / radius;
            const double v = -(y + 0.5 - cy) / radius;
            const double r2 = u * u + v * v;
            if (r2 >= 1.0) continue;
            const Vec3 normal(u, v, std::sqrt(1.0 - r2));
            scene.normals.at(x, y) = normal;
            if (normal.z() < 0.1) {
                scene.mask.at(x, y) = 0;
            } else {
                out.sphere.at(x, y) = 1;
            }
        }
    }
    return out;
}

double nmse(const LinearImage& estimate, const LinearImage& truth)
{
    if (!estimate.same_shape(truth)) throw Error(ErrorCode::DimensionMismatch, "nmse operands differ in size");
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < truth.data().size(); ++i) {
        const double d = estimate.data()[i] - truth.data()[i];
        err += d * d;
        ref += truth.data()[i] * truth.data()[i];
    }
    if (!(ref > 0.0)) throw Error(ErrorCode::ZeroTruth, "reference image is all zero");
    return err / ref;
}

Vec3 nmse_per_channel(const LinearImage& estimate, const LinearImage& truth)
{
    if (!estimate.same_shape(truth)) throw Error(ErrorCode::DimensionMismatch, "nmse operands differ in size");
    Vec3 err = Vec3::Zero();
    Vec3 ref = Vec3::Zero();
    for (std::size_t i = 0; i < truth.pixel_count(); ++i) {
        const Vec3 d = estimate.pixel(i) - truth.pixel(i);
        err += d.cwiseProduct(d);
        ref += truth.pixel(i).cwiseProduct(truth.pixel(i));
    }
    if (!(ref.minCoeff() > 0.0)) throw Error(ErrorCode::ZeroTruth, "a reference channel is all zero");
    return err.cwiseQuotient(ref);
}

}  // namespace lumisep
