#include <doctest.h>

#include <cmath>

#include "lumisep/synth.hpp"
#include "support.hpp"

using namespace lumisep;
using support::model;

namespace {

SceneSpec one_pixel(const Vec3& a, const Vec3& normal, const std::vector<SceneLight>& lights)
{
    SceneSpec s;
    s.width = s.height = 1;
    s.normals = Field<Vec3>(1, 1, normal);
    s.reflectance = Field<Vec3>(1, 1, a);
    s.lights = lights;
    s.occlusion.assign(lights.size(), Field<double>(1, 1, 1.0));
    s.mask = Mask(1, 1, 1);
    return s;
}

/// Sample-wise curve value at a grid wavelength.
double at(const SpectralCurve& c, double l) { return c[static_cast<std::size_t>(std::lround((l - 400.0) / 10.0))]; }

}  // namespace

TEST_CASE("render: single pixel matches direct quadrature")
{
    const auto& m = model();
    const Vec3 a(0.4, 0.03, -0.02);
    const Vec3 b = place_coefficients(m.flash.f, 2, 20.0, 0.4)[0];
    const Vec3 l = Vec3(0.3, 0.2, 1).normalized();
    const Vec3 n = Vec3(0.1, -0.05, 1).normalized();
    const auto gt = render(one_pixel(a, n, {{l, b, 1.5}}), m);
    const auto rho = reconstruct_spectrum(a, m.reflectance);
    const auto ell = reconstruct_spectrum(b, m.illumination);
    const double eta = 1.5 * n.dot(l);
    for (int k = 0; k < 3; ++k) {
        const auto& S = m.response.channels[k];
        const double want = eta * oracle::integrate(
                                      [&](double wl) { return std::max(0.0, at(rho, wl)) * at(S, wl) * at(ell, wl); },
                                      400, 700, 10);
        CHECK(gt.layers[0](0, 0, k) == doctest::Approx(want).epsilon(1e-12));
        CHECK(gt.noflash(0, 0, k) == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(gt.shading[0][0] == doctest::Approx(eta));
    CHECK((gt.gamma.gamma[0] - b).norm() < 1e-12);
    CHECK(gt.gamma.beta_norm[0] == doctest::Approx(a.norm() * eta));
}

TEST_CASE("render: zero intensity and linearity")
{
    const auto& m = model();
    const Vec3 a(0.4, 0.02, 0.01);
    const Vec3 b = m.flash.f;
    const Vec3 l = Vec3(0.2, 0.1, 1).normalized();
    const auto dark = render(one_pixel(a, Vec3::UnitZ(), {{l, b, 0.0}}), m);
    CHECK(dark.noflash.pixel(std::size_t{0}) == Vec3::Zero());
    CHECK(dark.gamma.mask[0] == 0);
    const auto one = render(one_pixel(a, Vec3::UnitZ(), {{l, b, 1.0}}), m);
    const auto two = render(one_pixel(a, Vec3::UnitZ(), {{l, b, 2.0}}), m);
    CHECK((two.noflash.pixel(std::size_t{0}) - 2 * one.noflash.pixel(std::size_t{0})).norm() < 1e-14);
    // Flash and pure flash do not depend on the ambient lights.
    CHECK((two.pureflash.pixel(std::size_t{0}) - one.pureflash.pixel(std::size_t{0})).norm() < 1e-12);
    // Two lights: noflash is the sum of both single-light renders.
    const Vec3 l2 = Vec3(-0.3, 0.1, 1).normalized();
    const auto both = render(one_pixel(a, Vec3::UnitZ(), {{l, b, 1.0}, {l2, b, 1.0}}), m);
    const auto second = render(one_pixel(a, Vec3::UnitZ(), {{l2, b, 1.0}}), m);
    CHECK((both.noflash.pixel(std::size_t{0}) - one.noflash.pixel(std::size_t{0}) - second.noflash.pixel(std::size_t{0}))
              .norm() < 1e-14);
}

TEST_CASE("render: back-facing lights and masked pixels give nothing")
{
    const auto& m = model();
    const auto back = render(one_pixel(Vec3(0.4, 0, 0), Vec3::UnitZ(), {{-Vec3::UnitZ(), m.flash.f, 1.0}}), m);
    CHECK(back.noflash.pixel(std::size_t{0}) == Vec3::Zero());
    auto s = one_pixel(Vec3(0.4, 0, 0), Vec3::UnitZ(), {{Vec3::UnitZ(), m.flash.f, 1.0}});
    s.mask[0] = 0;
    const auto masked = render(s, m);
    CHECK(masked.flash.pixel(std::size_t{0}) == Vec3::Zero());
}

TEST_CASE("scene validation")
{
    auto s = one_pixel(Vec3(0.4, 0, 0), Vec3::UnitZ(), {{Vec3::UnitZ(), Vec3::UnitX(), 1.0}});
    CHECK_NOTHROW(s.validate());
    auto bad = s;
    bad.lights[0].coefficients = Vec3(2, 0, 0);
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = s;
    bad.occlusion[0][0] = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = s;
    bad.occlusion.clear();
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("CountMismatch"), Error);
}

TEST_CASE("pure-pixel scene")
{
    for (int n : {1, 2, 3}) {
        const auto scene = make_pure_pixel_scene(n, 15.0, 64, 9, model());
        CHECK(scene.lights.size() == static_cast<std::size_t>(n));
        const auto gt = render(scene, model());
        // Every light has at least 2% of the image to itself.
        for (int i = 0; i < n; ++i) {
            std::size_t pure = 0;
            for (std::size_t p = 0; p < gt.noflash.pixel_count(); ++p) {
                bool only = gt.shading[i][p] > 0;
                for (int j = 0; j < n; ++j) only = only && (j == i || gt.shading[j][p] == 0);
                pure += only ? 1 : 0;
            }
            CHECK(static_cast<double>(pure) >= 0.02 * gt.noflash.pixel_count());
        }
        // Pairwise separation as requested.
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                CHECK(std::abs(support::deg(angle_between(scene.lights[i].coefficients, scene.lights[j].coefficients)) -
                               15.0) < 1e-9);
            }
        }
        // Deterministic in the seed.
        const auto again = make_pure_pixel_scene(n, 15.0, 64, 9, model());
        CHECK(again.reflectance.values == scene.reflectance.values);
        CHECK(again.normals.values == scene.normals.values);
    }
    CHECK_THROWS_AS(make_pure_pixel_scene(4, 15.0, 64, 9, model()), Error);
    CHECK_THROWS_AS(make_pure_pixel_scene(2, 0.0, 64, 9, model()), Error);
}

TEST_CASE("place_coefficients separations")
{
    const Vec3 c = model().flash.f;
    for (double sep : {5.0, 10.0, 25.0}) {
        const auto two = place_coefficients(c, 2, sep, 0.3);
        CHECK(std::abs(support::deg(angle_between(two[0], two[1])) - sep) < 1e-9);
        const auto three = place_coefficients(c, 3, sep, 0.3);
        CHECK(std::abs(support::deg(angle_between(three[0], three[1])) - sep) < 1e-9);
        CHECK(std::abs(support::deg(angle_between(three[1], three[2])) - sep) < 1e-9);
        CHECK(std::abs(support::deg(angle_between(three[0], three[2])) - sep) < 1e-9);
    }
}

TEST_CASE("sphere scene")
{
    const auto& m = model();
    std::vector<SceneLight> lights;
    const auto coeffs = place_coefficients(m.flash.f, 3, 20.0, 0.3);
    for (int i = 0; i < 3; ++i) {
        const double phi = 2 * M_PI * i / 3, t = 30 * M_PI / 180;
        lights.push_back({Vec3(std::sin(t) * std::cos(phi), std::sin(t) * std::sin(phi), std::cos(t)), coeffs[i], 1.0});
    }
    const auto sph = make_sphere_scene(lights, 0.9, 64, 1, m);
    CHECK((sph.scene.normals.at(32, 32) - Vec3::UnitZ()).norm() < 0.05);
    CHECK(sph.sphere.at(32, 32) == 1);
    // Limb pixels have n_z < 0.1 and are masked out of the render.
    std::size_t limb = 0;
    for (std::size_t i = 0; i < sph.scene.mask.size(); ++i) {
        if (sph.scene.normals[i].z() < 0.1) {
            ++limb;
            CHECK(sph.scene.mask[i] == 0);
            CHECK(sph.sphere[i] == 0);
        }
    }
    CHECK(limb > 0);
    CHECK(sph.scene.mask.at(0, 0) == 1);
    CHECK(sph.sphere.at(0, 0) == 0);
    lights[2].direction = lights[1].direction;
    CHECK_THROWS_WITH_AS(make_sphere_scene(lights, 0.9, 64, 1, m), doctest::Contains("DegenerateDirections"), Error);
}

TEST_CASE("noise is reproducible and clamped")
{
    const auto scene = make_pure_pixel_scene(2, 15.0, 32, 3, model());
    const auto gt = render(scene, model());
    const auto a = add_noise(gt, 0.01, 5);
    const auto b = add_noise(gt, 0.01, 5);
    CHECK(a.flash.data() == b.flash.data());
    CHECK(a.noflash.data() == b.noflash.data());
    for (double v : a.noflash.data()) CHECK(v >= 0.0);
    const auto none = add_noise(gt, 0.0, 5);
    CHECK(none.noflash.data() == gt.noflash.data());
    CHECK_THROWS_AS(add_noise(gt, -1.0, 5), Error);
}

TEST_CASE("nmse")
{
    LinearImage t(2, 1, 1.0), e(2, 1, 1.0);
    CHECK(nmse(e, t) == 0.0);
    e(0, 0, 0) = 2.0;
    CHECK(nmse(e, t) == doctest::Approx(1.0 / 6.0));
    CHECK(nmse_per_channel(e, t)[0] == doctest::Approx(0.5));
    CHECK(nmse_per_channel(e, t)[1] == 0.0);
    CHECK(nmse(t * 2.0, t) == doctest::Approx(1.0));
    CHECK_THROWS_WITH_AS(nmse(e, LinearImage(2, 1)), doctest::Contains("ZeroTruth"), Error);
    CHECK_THROWS_AS(nmse(e, LinearImage(1, 1, 1.0)), Error);
}
