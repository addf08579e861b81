#include <doctest.h>

#include <random>

#include "lumisep/apps.hpp"
#include "support.hpp"

using namespace lumisep;
using support::model;

namespace {

struct Fixture {
    SceneSpec scene;
    GroundTruth truth;
    PipelineResult result;
    RelightBundle bundle;
};

const Fixture& fixture()
{
    static const Fixture f = [] {
        Fixture x;
        x.scene = make_pure_pixel_scene(2, 20.0, 64, 77, model());
        x.truth = render(x.scene, model());
        PipelineConfig cfg;
        cfg.n = 2;
        x.result = run_pipeline(x.truth.noflash, x.truth.pureflash, model(), cfg,
                                LightEstimate{support::truth_coefficients(x.scene), "truth", {}});
        x.bundle = build_relight_bundle(x.result.alpha, x.result.gamma, x.result.separation.shading,
                                        x.result.separation.lights, model().coupling);
        return x;
    }();
    return f;
}

Vec3 random_unit_near(const Vec3& c, std::mt19937_64& rng)
{
    std::normal_distribution<double> N(0, 0.1);
    return (c + Vec3(N(rng), N(rng), N(rng))).normalized();
}

}  // namespace

TEST_CASE("identity edit reproduces the sum of the layers")
{
    const auto& f = fixture();
    const auto img = relight(f.bundle, identity_edit(f.bundle));
    const auto sum = f.result.separation.layers[0] + f.result.separation.layers[1];
    double worst = 0;
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        worst = std::max(worst, std::abs(img.data()[i] - sum.data()[i]) / std::max(1e-12, sum.max_value()));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("brightness is linear")
{
    const auto& f = fixture();
    auto edit = identity_edit(f.bundle);
    edit[0].brightness = 0.0;
    const auto off = relight(f.bundle, edit);
    for (std::size_t i = 0; i < off.data().size(); ++i) {
        CHECK(std::abs(off.data()[i] - f.result.separation.layers[1].data()[i]) <= 1e-12 * (1 + off.max_value()));
    }
    edit[0].brightness = 2.0;
    const auto twice = relight(f.bundle, edit);
    const auto want = f.result.separation.layers[0] * 2.0 + f.result.separation.layers[1];
    for (std::size_t i = 0; i < twice.data().size(); ++i) {
        CHECK(std::abs(twice.data()[i] - want.data()[i]) <= 1e-12 * (1 + want.max_value()));
    }
}

TEST_CASE("random edits match the per-pixel formula")
{
    const auto& f = fixture();
    const auto& r = f.result;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> U(0, 3);
    for (int trial = 0; trial < 100; ++trial) {
        RelightEdit edit;
        for (int j = 0; j < 2; ++j) edit.push_back({U(rng), random_unit_near(model().flash.f, rng)});
        const auto img = relight(f.bundle, edit);
        std::uniform_int_distribution<std::size_t> P(0, img.pixel_count() - 1);
        for (int s = 0; s < 20; ++s) {
            const std::size_t i = P(rng);
            Vec3 want = Vec3::Zero();
            if (r.alpha.mask[i] && r.gamma.mask[i] && r.separation.shading.mask[i]) {
                const Vec3 ah = r.alpha.alpha[i].normalized();
                for (int j = 0; j < 2; ++j) {
                    for (int k = 0; k < 3; ++k) {
                        want[k] += edit[j].brightness * r.gamma.beta_norm[i] * r.separation.shading.z[i][j] *
                                   ah.dot(model().coupling.E[k] * edit[j].coefficients);
                    }
                }
            }
            want = want.cwiseMax(0.0);
            CHECK((img.pixel(i) - want).norm() <= 1e-12 * (1 + want.norm()));
        }
    }
}

TEST_CASE("masked pixels stay black")
{
    const auto& f = fixture();
    AlphaField alpha = f.result.alpha;
    for (std::size_t i = 0; i < alpha.mask.size(); i += 7) alpha.mask[i] = 0;
    const auto bundle = build_relight_bundle(alpha, f.result.gamma, f.result.separation.shading,
                                             f.result.separation.lights, model().coupling);
    const auto img = relight(bundle, RelightEdit(2, LightEdit{1.5, model().flash.f}));
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        if (!alpha.mask[i]) CHECK(img.pixel(i) == Vec3::Zero());
        else CHECK(img.pixel(i).norm() > 0);
    }
}

TEST_CASE("edit validation")
{
    const auto& f = fixture();
    CHECK_THROWS_WITH_AS(relight(f.bundle, RelightEdit{{1.0, Vec3::UnitX()}}), doctest::Contains("CountMismatch"),
                         Error);
    CHECK_THROWS_AS(relight(f.bundle, RelightEdit(2, LightEdit{-1.0, Vec3::UnitX()})), Error);
    CHECK_THROWS_AS(relight(f.bundle, RelightEdit(2, LightEdit{1.0, Vec3(1, 1, 0)})), Error);
}

TEST_CASE("white balance")
{
    const auto& f = fixture();
    const auto wb = white_balance(f.bundle, model().flash);
    SUBCASE("matches the pure-flash chromaticity at every pixel")
    {
        for (std::size_t i = 0; i < wb.pixel_count(); ++i) {
            if (!f.result.separation.mask[i]) continue;
            const Vec3 a = wb.pixel(i), b = f.truth.pureflash.pixel(i);
            if (a.norm() == 0 || b.norm() == 0) continue;
            CHECK((a.normalized() - b.normalized()).norm() < 1e-10);
        }
    }
    SUBCASE("a gray surface comes out with the flash's color")
    {
        // Flat reflectance gives the camera's view of the flash spectrum.
        const Vec3 gray = project_spectrum(SpectralCurve::constant(default_grid(), 0.5), model().reflectance);
        const Vec3 flash_rgb = model().coupling.flash_system(model().flash.f) * gray;
        const Vec3 lit = model().coupling.reflectance_system(gray.normalized()) * model().flash.f;
        CHECK((lit.normalized() - flash_rgb.normalized()).norm() < 0.01);
    }
    SUBCASE("lights already equal to the flash are a fixed point")
    {
        RelightBundle b = f.bundle;
        b.lights.assign(2, model().flash.f);
        const auto again = relight(b, identity_edit(b));
        const auto wb2 = white_balance(b, model().flash);
        for (std::size_t i = 0; i < again.data().size(); ++i) CHECK(again.data()[i] == wb2.data()[i]);
    }
}

TEST_CASE("shading images")
{
    const auto& f = fixture();
    const auto s = shading_images(f.result.gamma, f.result.separation.shading);
    REQUIRE(s.size() == 2);
    // Unknown global per-light scale: compare against truth ‖a‖η up to a ratio.
    for (int j = 0; j < 2; ++j) {
        double ratio = 0;
        std::vector<int> perm;
        oracle::matched_angles_deg(f.result.separation.lights.coefficients, support::truth_coefficients(f.scene),
                                   &perm);
        for (std::size_t i = 0; i < s[j].size(); ++i) {
            const double want = f.scene.reflectance[i].norm() * f.truth.shading[j][i];
            const double got = s[perm[j]][i];
            if (!f.result.separation.mask[i] || want < 1e-6) continue;
            if (ratio == 0) ratio = got / want;
            CHECK(std::abs(got / want - ratio) < 1e-9 * ratio);
        }
        CHECK(ratio > 0);
    }
    const auto fl = flash_shading_image(f.result.alpha);
    for (std::size_t i = 0; i < fl.size(); ++i) CHECK(fl[i] == f.result.alpha.alpha[i].norm());
}

TEST_CASE("photometric stereo")
{
    const std::vector<Vec3> dirs{Vec3(0.5, 0, 1).normalized(), Vec3(-0.25, 0.43, 1).normalized(),
                                 Vec3(-0.25, -0.43, 1).normalized(), Vec3(0, 0, 1)};
    const Vec3 n = Vec3(0.2, -0.1, 1).normalized();
    const double rho = 0.6;
    auto images = [&](const Vec3& normal) {
        std::vector<Field<double>> s;
        for (const auto& l : dirs) s.emplace_back(2, 1, rho * std::max(0.0, normal.dot(l)));
        // A brighter second pixel keeps every image's max away from the test pixel.
        for (auto& f : s) f[1] = 1.0;
        return s;
    };
    SUBCASE("exact normals and albedo")
    {
        const auto s = images(n);
        const auto out = photometric_stereo(s, dirs);
        REQUIRE(out.mask[0]);
        CHECK((out.normals[0] - n).norm() < 1e-12);
        CHECK(out.albedo[0] == doctest::Approx(rho).epsilon(1e-12));
        CHECK(out.residual[0] < 1e-12);
    }
    SUBCASE("one shadowed light is dropped")
    {
        const Vec3 tilted = Vec3(-0.9, 0, 0.45).normalized();
        auto s = images(tilted);
        REQUIRE(s[0][0] == 0.0);
        const auto out = photometric_stereo(s, dirs);
        REQUIRE(out.mask[0]);
        CHECK((out.normals[0] - tilted).norm() < 1e-12);
    }
    SUBCASE("intensities scale the light rows")
    {
        auto s = images(n);
        const std::vector<double> gains{2, 1, 1, 0.5};
        for (int j = 0; j < 4; ++j) s[j][0] *= gains[j];
        PhotometricOptions opt;
        opt.intensities = gains;
        const auto out = photometric_stereo(s, dirs, opt);
        CHECK((out.normals[0] - n).norm() < 1e-12);
    }
    SUBCASE("degenerate directions")
    {
        // The third direction lies in the plane of the first two.
        const Vec3 l1 = Vec3(1, 0, 1).normalized(), l2 = Vec3(0, 1, 1).normalized();
        const std::vector<Vec3> flat{l1, l2, (l1 + l2).normalized()};
        const auto s = images(n);
        CHECK_THROWS_WITH_AS(photometric_stereo(std::span(s).first(3), flat), doctest::Contains("DegenerateDirections"),
                             Error);
        CHECK_THROWS_WITH_AS(photometric_stereo(std::span(s).first(2), std::span(dirs).first(2)),
                             doctest::Contains("DegenerateDirections"), Error);
        CHECK_THROWS_WITH_AS(photometric_stereo(std::span(s).first(3), dirs), doctest::Contains("CountMismatch"),
                             Error);
    }
}
